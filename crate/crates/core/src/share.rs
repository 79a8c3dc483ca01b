//! Shared snapshots of a set of files, stored one JSON document per record.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ID_LEN: usize = 8;
pub const MAX_SHARE_BYTES: usize = 256 * 1024;
const ALPHABET: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub files: BTreeMap<String, String>,
    /// Id at an external share service holding the files. When set,
    /// `files` is empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remote: Option<String>,
}

#[derive(Debug, Error)]
pub enum ShareError {
    #[error("nothing to share")]
    Empty,
    #[error("shared files are {size} bytes, more than the {max} byte limit")]
    TooLarge { size: usize, max: usize },
    #[error("share {0} not found")]
    NotFound(String),
    #[error("share backend failed: {0}")]
    Upstream(String),
    #[error("share record {id} is unreadable: {reason}")]
    Corrupt { id: String, reason: String },
    #[error("share storage error: {0}")]
    Io(#[from] io::Error),
}

/// Size of a share as counted against [`MAX_SHARE_BYTES`]: names plus contents.
pub fn share_size(files: &BTreeMap<String, String>) -> usize {
    files.iter().map(|(n, c)| n.len() + c.len()).sum()
}

pub fn validate_files(files: &BTreeMap<String, String>) -> Result<(), ShareError> {
    if files.is_empty() {
        return Err(ShareError::Empty);
    }
    let size = share_size(files);
    if size > MAX_SHARE_BYTES {
        return Err(ShareError::TooLarge {
            size,
            max: MAX_SHARE_BYTES,
        });
    }
    Ok(())
}

/// A fresh 8-character base36 id from the thread-local CSPRNG.
pub fn new_id() -> String {
    let mut rng = rand::rng();
    (0..ID_LEN)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())] as char)
        .collect()
}

pub fn is_valid_id(id: &str) -> bool {
    id.len() == ID_LEN && id.bytes().all(|b| ALPHABET.contains(&b))
}

/// Records under a directory, one `<id>.json` each. Records are immutable:
/// a write never replaces an existing file.
#[derive(Debug, Clone)]
pub struct LocalShareStore {
    dir: PathBuf,
}

impl LocalShareStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ShareError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(LocalShareStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn create(&self, files: BTreeMap<String, String>) -> Result<ShareRecord, ShareError> {
        validate_files(&files)?;
        self.insert(files, None)
    }

    /// Record that a share lives at an external service under `remote_id`.
    pub fn create_pointer(&self, remote_id: &str) -> Result<ShareRecord, ShareError> {
        self.insert(BTreeMap::new(), Some(remote_id.to_string()))
    }

    fn insert(&self, files: BTreeMap<String, String>, remote: Option<String>) -> Result<ShareRecord, ShareError> {
        let mut record = ShareRecord {
            id: String::new(),
            created_at: Utc::now(),
            files,
            remote,
        };
        loop {
            record.id = new_id();
            let json = serde_json::to_vec(&record).map_err(io::Error::other)?;
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            tmp.write_all(&json)?;
            tmp.as_file().sync_all()?;
            match tmp.persist_noclobber(self.path(&record.id)) {
                Ok(_) => return Ok(record),
                // id taken; draw another
                Err(e) if e.error.kind() == io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(e.error.into()),
            }
        }
    }

    pub fn fetch(&self, id: &str) -> Result<ShareRecord, ShareError> {
        if !is_valid_id(id) {
            return Err(ShareError::NotFound(id.to_string()));
        }
        let bytes = match fs::read(self.path(id)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(ShareError::NotFound(id.to_string())),
            Err(e) => return Err(e.into()),
        };
        let record: ShareRecord = serde_json::from_slice(&bytes).map_err(|e| ShareError::Corrupt {
            id: id.to_string(),
            reason: e.to_string(),
        })?;
        if record.id != id {
            return Err(ShareError::Corrupt {
                id: id.to_string(),
                reason: format!("record claims id {}", record.id),
            });
        }
        Ok(record)
    }
}
