use std::net::{IpAddr, Ipv4Addr};
use std::path::{Path, PathBuf};

use kbide_core::ResourceLimits;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CONFIG_FILE: &str = "ide.json";
pub const DEFAULT_PORT: u16 = 4004;
pub const DEFAULT_MAX_BODY_BYTES: usize = 1_048_576;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Single user on this machine: the workspace is writable.
    Local,
    /// Public deployment: read-only workspace and resource limits.
    Online,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShareBackendConfig {
    Local,
    External {
        base_url: String,
        /// Name of the environment variable holding the bearer token, if any.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        token_env_var: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerConfig {
    pub workspace: PathBuf,
    pub mode: Mode,
    pub port: u16,
    /// Required in online mode; local mode defaults to loopback.
    pub bind: Option<IpAddr>,
    pub limits: ResourceLimits,
    pub share_backend: ShareBackendConfig,
    /// Where local share records live; defaults to `<workspace>/shares`.
    pub share_dir: Option<PathBuf>,
    /// Tutorial bundles; the built-in set is used when unset.
    pub tutorials_dir: Option<PathBuf>,
    /// Frontend assets served at `/`.
    pub static_dir: Option<PathBuf>,
    /// Origin used in share links, e.g. `https://ide.example.org`. Taken from
    /// the request's Host header when unset.
    pub public_url: Option<String>,
    pub max_body_bytes: usize,
}

/// On-disk form of `ide.json`; everything but the workspace is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    workspace: Option<PathBuf>,
    mode: Option<Mode>,
    port: Option<u16>,
    bind: Option<IpAddr>,
    limits: Option<ResourceLimits>,
    share_backend: Option<ShareBackendConfig>,
    share_dir: Option<PathBuf>,
    tutorials_dir: Option<PathBuf>,
    static_dir: Option<PathBuf>,
    public_url: Option<String>,
    max_body_bytes: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("workspace {0} is not a readable directory")]
    Workspace(PathBuf),
    #[error("port must be between 1 and 65535")]
    Port,
    #[error("online mode needs an explicit bind address")]
    OnlineBind,
    #[error("invalid value {value:?} for {var}")]
    Env { var: &'static str, value: String },
    #[error(transparent)]
    Limits(#[from] kbide_core::limits::InvalidLimits),
}

impl ServerConfig {
    /// Defaults for a workspace directory.
    pub fn new(workspace: impl Into<PathBuf>, mode: Mode) -> Self {
        ServerConfig {
            workspace: workspace.into(),
            mode,
            port: DEFAULT_PORT,
            bind: None,
            limits: default_limits(mode),
            share_backend: ShareBackendConfig::Local,
            share_dir: None,
            tutorials_dir: None,
            static_dir: None,
            public_url: None,
            max_body_bytes: DEFAULT_MAX_BODY_BYTES,
        }
    }

    /// Read `ide.json`. Relative paths in it are taken relative to the file.
    /// A missing file yields a local-mode config for the current directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let file: ConfigFile = match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => ConfigFile::default(),
            Err(source) => {
                return Err(ConfigError::Read {
                    path: path.to_path_buf(),
                    source,
                })
            }
        };
        let rel = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let mode = file.mode.unwrap_or(Mode::Local);
        let mut config = ServerConfig::new(rel(file.workspace.unwrap_or_else(|| PathBuf::from("."))), mode);
        config.port = file.port.unwrap_or(DEFAULT_PORT);
        config.bind = file.bind;
        if let Some(l) = file.limits {
            config.limits = l;
        }
        config.share_backend = file.share_backend.unwrap_or(ShareBackendConfig::Local);
        config.share_dir = file.share_dir.map(rel);
        config.tutorials_dir = file.tutorials_dir.map(rel);
        config.static_dir = file.static_dir.map(rel);
        config.public_url = file.public_url;
        config.max_body_bytes = file.max_body_bytes.unwrap_or(DEFAULT_MAX_BODY_BYTES);
        Ok(config)
    }

    /// Apply `KBIDE_PORT` and `KBIDE_MODE`. Switching mode also switches the
    /// default limits.
    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = get("KBIDE_PORT") {
            self.port = v.parse().map_err(|_| ConfigError::Env {
                var: "KBIDE_PORT",
                value: v.clone(),
            })?;
        }
        if let Some(v) = get("KBIDE_MODE") {
            let mode = match v.as_str() {
                "local" => Mode::Local,
                "online" => Mode::Online,
                _ => {
                    return Err(ConfigError::Env {
                        var: "KBIDE_MODE",
                        value: v,
                    })
                }
            };
            if mode != self.mode && self.limits == default_limits(self.mode) {
                self.limits = default_limits(mode);
            }
            self.mode = mode;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if std::fs::read_dir(&self.workspace).is_err() {
            return Err(ConfigError::Workspace(self.workspace.clone()));
        }
        if self.port == 0 {
            return Err(ConfigError::Port);
        }
        if self.mode == Mode::Online && self.bind.is_none() {
            return Err(ConfigError::OnlineBind);
        }
        self.limits.validate()?;
        Ok(())
    }

    pub fn bind_addr(&self) -> IpAddr {
        self.bind.unwrap_or(IpAddr::V4(Ipv4Addr::LOCALHOST))
    }

    pub fn share_dir(&self) -> PathBuf {
        self.share_dir.clone().unwrap_or_else(|| self.workspace.join("shares"))
    }
}

pub fn default_limits(mode: Mode) -> ResourceLimits {
    match mode {
        Mode::Local => ResourceLimits::local(),
        Mode::Online => ResourceLimits::online(),
    }
}
