//! Workspace file access. Request paths are checked with [`WorkspacePath`]
//! before any filesystem call is made.

use std::io::{self, Write};
use std::path::{Component, Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid workspace path {0:?}")]
pub struct PathError(pub String);

/// A relative path that stays inside the workspace: `/`-separated, no `.`,
/// `..`, empty or hidden segments, no backslashes or NULs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkspacePath(String);

impl WorkspacePath {
    pub fn parse(raw: &str) -> Result<Self, PathError> {
        let bad = || PathError(raw.to_string());
        if raw.is_empty() || raw.len() > 1024 || raw.contains(['\\', '\0', ':']) {
            return Err(bad());
        }
        for seg in raw.split('/') {
            if seg.is_empty() || seg.starts_with('.') {
                return Err(bad());
            }
        }
        // belt and braces against platform-specific prefixes
        if !Path::new(raw).components().all(|c| matches!(c, Component::Normal(_))) {
            return Err(bad());
        }
        Ok(WorkspacePath(raw.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Error)]
pub enum FsError {
    #[error("file {0} not found")]
    NotFound(String),
    #[error("{0} leaves the workspace")]
    Escapes(String),
    #[error("{0} is not valid UTF-8 text")]
    NotText(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What the server needs from a workspace. Tests substitute a recording
/// implementation to observe writes.
pub trait WorkspaceFs: Send + Sync {
    /// Every visible regular file, as sorted `/`-separated relative paths.
    fn list(&self) -> Result<Vec<String>, FsError>;
    fn read(&self, path: &WorkspacePath) -> Result<String, FsError>;
    /// Replace the file atomically, creating parent directories.
    fn write(&self, path: &WorkspacePath, content: &str) -> Result<(), FsError>;
}

pub struct DiskWorkspace {
    root: PathBuf,
    /// Directories under the root that are not part of the workspace.
    excluded: Vec<PathBuf>,
}

impl DiskWorkspace {
    pub fn new(root: &Path) -> io::Result<Self> {
        Ok(DiskWorkspace {
            root: root.canonicalize()?,
            excluded: Vec::new(),
        })
    }

    /// Hide a directory (e.g. the share store) from listings and access.
    pub fn exclude(mut self, dir: &Path) -> Self {
        let dir = dir.canonicalize().unwrap_or_else(|_| dir.to_path_buf());
        self.excluded.push(dir);
        self
    }

    fn allowed(&self, real: &Path) -> bool {
        real.starts_with(&self.root) && !self.excluded.iter().any(|d| real.starts_with(d))
    }

    /// Resolve symlinks and make sure the target is still inside the root.
    fn existing(&self, path: &WorkspacePath) -> Result<PathBuf, FsError> {
        let real = match self.root.join(path.as_str()).canonicalize() {
            Ok(p) => p,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(FsError::NotFound(path.0.clone())),
            Err(e) => return Err(e.into()),
        };
        if !self.allowed(&real) {
            return Err(FsError::Escapes(path.0.clone()));
        }
        Ok(real)
    }
}

impl WorkspaceFs for DiskWorkspace {
    fn list(&self) -> Result<Vec<String>, FsError> {
        let mut out = Vec::new();
        let walk = walkdir::WalkDir::new(&self.root)
            .min_depth(1)
            .into_iter()
            .filter_entry(|e| {
                !e.file_name().to_string_lossy().starts_with('.') && !self.excluded.iter().any(|d| e.path() == d)
            });
        for entry in walk {
            let entry = entry.map_err(|e| io::Error::other(e.to_string()))?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry.path().strip_prefix(&self.root).unwrap_or(entry.path());
            let parts: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            out.push(parts.join("/"));
        }
        out.sort();
        Ok(out)
    }

    fn read(&self, path: &WorkspacePath) -> Result<String, FsError> {
        let real = self.existing(path)?;
        if !real.is_file() {
            return Err(FsError::NotFound(path.0.clone()));
        }
        let bytes = std::fs::read(&real)?;
        String::from_utf8(bytes).map_err(|_| FsError::NotText(path.0.clone()))
    }

    fn write(&self, path: &WorkspacePath, content: &str) -> Result<(), FsError> {
        let target = self.root.join(path.as_str());
        let parent = target.parent().unwrap_or(&self.root);
        // check the deepest existing ancestor before creating anything below it
        let existing = parent.ancestors().find(|a| a.exists()).unwrap_or(&self.root);
        if !self.allowed(&existing.canonicalize()?) {
            return Err(FsError::Escapes(path.0.clone()));
        }
        std::fs::create_dir_all(parent)?;
        let real_parent = parent.canonicalize()?;
        if !self.allowed(&real_parent) {
            return Err(FsError::Escapes(path.0.clone()));
        }
        if let Ok(meta) = std::fs::symlink_metadata(&target) {
            if meta.file_type().is_symlink() || meta.is_dir() {
                return Err(FsError::Escapes(path.0.clone()));
            }
        }
        let mut tmp = tempfile::NamedTempFile::new_in(&real_parent)?;
        tmp.write_all(content.as_bytes())?;
        tmp.as_file().sync_all()?;
        let name = target.file_name().ok_or_else(|| FsError::Escapes(path.0.clone()))?;
        tmp.persist(real_parent.join(name)).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_validation() {
        for ok in ["a.kb", "dir/b.kb", "x y/z-1.kb"] {
            assert!(WorkspacePath::parse(ok).is_ok(), "{ok}");
        }
        for bad in [
            "",
            "../etc/passwd",
            "a/../../b",
            "/etc/passwd",
            "a//b",
            "./a",
            ".hidden",
            "a\\b",
            "c:foo",
            "a/",
            "nul\0",
        ] {
            assert!(WorkspacePath::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn write_read_list() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("shares")).unwrap();
        std::fs::write(dir.path().join("shares/x.json"), "{}").unwrap();
        std::fs::write(dir.path().join(".secret"), "").unwrap();
        let ws = DiskWorkspace::new(dir.path())
            .unwrap()
            .exclude(&dir.path().join("shares"));
        let p = WorkspacePath::parse("sub/a.kb").unwrap();
        ws.write(&p, "theory\r\n").unwrap();
        assert_eq!(ws.read(&p).unwrap(), "theory\r\n");
        ws.write(&p, "v2").unwrap();
        assert_eq!(ws.read(&p).unwrap(), "v2");
        assert_eq!(ws.list().unwrap(), vec!["sub/a.kb"]);
        assert!(matches!(
            ws.read(&WorkspacePath::parse("none.kb").unwrap()),
            Err(FsError::NotFound(_))
        ));
        assert!(matches!(
            ws.read(&WorkspacePath::parse("shares/x.json").unwrap()),
            Err(FsError::Escapes(_))
        ));
    }

    #[cfg(unix)]
    #[test]
    fn symlinks_cannot_escape() {
        let outside = tempfile::tempdir().unwrap();
        std::fs::write(outside.path().join("f"), "secret").unwrap();
        let dir = tempfile::tempdir().unwrap();
        std::os::unix::fs::symlink(outside.path(), dir.path().join("link")).unwrap();
        let ws = DiskWorkspace::new(dir.path()).unwrap();
        let p = WorkspacePath::parse("link/f").unwrap();
        assert!(matches!(ws.read(&p), Err(FsError::Escapes(_))));
        assert!(matches!(ws.write(&p, "x"), Err(FsError::Escapes(_))));
        let deep = WorkspacePath::parse("link/new/f").unwrap();
        assert!(matches!(ws.write(&deep, "x"), Err(FsError::Escapes(_))));
        assert!(!outside.path().join("new").exists());
        assert_eq!(std::fs::read_to_string(outside.path().join("f")).unwrap(), "secret");
    }
}
