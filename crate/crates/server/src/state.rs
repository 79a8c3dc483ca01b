use std::sync::Arc;

use kbide_core::editor::{builtin_snippets, load_snippets, Snippet};
use kbide_core::session::SessionRegistry;
use kbide_core::share::{LocalShareStore, ShareError};
use thiserror::Error;

use crate::config::{ServerConfig, ShareBackendConfig};
use crate::share::{ExternalShare, ShareBackend};
use crate::tutorials::{self, TutorialBundle, TutorialError};
use crate::workspace::{DiskWorkspace, WorkspaceFs};

/// Optional user snippets, read from the workspace root.
pub const SNIPPETS_FILE: &str = "snippets.json";

pub struct AppState {
    pub config: ServerConfig,
    pub fs: Arc<dyn WorkspaceFs>,
    pub sessions: SessionRegistry,
    pub share: ShareBackend,
    pub tutorials: Vec<TutorialBundle>,
    pub snippets: Vec<Snippet>,
}

#[derive(Debug, Error)]
pub enum StartError {
    #[error("cannot open workspace: {0}")]
    Workspace(std::io::Error),
    #[error("cannot open share store: {0}")]
    Share(#[from] ShareError),
    #[error(transparent)]
    Tutorials(#[from] TutorialError),
}

impl AppState {
    pub fn new(config: ServerConfig) -> Result<Arc<Self>, StartError> {
        let share = open_share(&config)?;
        let ws = DiskWorkspace::new(&config.workspace)
            .map_err(StartError::Workspace)?
            .exclude(share.dir());
        Self::with_parts(config, Arc::new(ws), share)
    }

    /// Build state around a given workspace implementation.
    pub fn with_fs(config: ServerConfig, fs: Arc<dyn WorkspaceFs>) -> Result<Arc<Self>, StartError> {
        let share = open_share(&config)?;
        Self::with_parts(config, fs, share)
    }

    fn with_parts(
        config: ServerConfig,
        fs: Arc<dyn WorkspaceFs>,
        share: ShareBackend,
    ) -> Result<Arc<Self>, StartError> {
        let tutorials = match &config.tutorials_dir {
            Some(dir) => tutorials::load_dir(dir)?,
            None => tutorials::builtin(),
        };
        let mut snippets = builtin_snippets();
        let user = config.workspace.join(SNIPPETS_FILE);
        if user.exists() {
            match load_snippets(&user) {
                Ok(extra) => {
                    snippets.retain(|s| !extra.iter().any(|e| e.trigger == s.trigger));
                    snippets.extend(extra);
                }
                Err(e) => tracing::warn!("ignoring {}: {e}", user.display()),
            }
        }
        Ok(Arc::new(AppState {
            config,
            fs,
            sessions: SessionRegistry::new(),
            share,
            tutorials,
            snippets,
        }))
    }
}

fn open_share(config: &ServerConfig) -> Result<ShareBackend, StartError> {
    let store = LocalShareStore::open(config.share_dir())?;
    Ok(match &config.share_backend {
        ShareBackendConfig::Local => ShareBackend::Local(store),
        ShareBackendConfig::External {
            base_url,
            token_env_var,
        } => {
            let token = token_env_var.as_ref().and_then(|v| std::env::var(v).ok());
            ShareBackend::External(ExternalShare::new(base_url, token, store))
        }
    })
}
