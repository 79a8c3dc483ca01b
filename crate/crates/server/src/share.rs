//! Share backends: the local record store, or an external paste service.
//!
//! The external service is expected to accept `POST {base_url}/shares` with
//! `{"files": {...}}` answering `{"id": "..."}`, and to serve
//! `GET {base_url}/shares/{id}` as `{"files": {...}}`. Its ids are kept in
//! local pointer records, so share links have the same shape for both
//! backends.

use std::collections::BTreeMap;
use std::time::Duration;

use kbide_core::share::{validate_files, LocalShareStore, ShareError};
use serde::{Deserialize, Serialize};

#[derive(Clone)]
pub enum ShareBackend {
    Local(LocalShareStore),
    External(ExternalShare),
}

#[derive(Clone)]
pub struct ExternalShare {
    client: reqwest::Client,
    base_url: String,
    token: Option<String>,
    pointers: LocalShareStore,
}

#[derive(Serialize, Deserialize)]
struct FilesBody {
    files: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct CreatedBody {
    id: String,
}

/// Remote ids end up in URLs and fragments; accept only a safe alphabet.
fn is_safe_remote_id(id: &str) -> bool {
    (1..=64).contains(&id.len()) && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn upstream(e: impl std::fmt::Display) -> ShareError {
    ShareError::Upstream(e.to_string())
}

impl ExternalShare {
    pub fn new(base_url: &str, token: Option<String>, pointers: LocalShareStore) -> Self {
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(15))
            .build()
            .expect("http client");
        ExternalShare {
            client,
            base_url: base_url.trim_end_matches('/').to_string(),
            token,
            pointers,
        }
    }

    fn auth(&self, req: reqwest::RequestBuilder) -> reqwest::RequestBuilder {
        match &self.token {
            Some(t) => req.bearer_auth(t),
            None => req,
        }
    }

    /// Upload, then record the remote id under a fresh local id.
    async fn create(&self, files: BTreeMap<String, String>) -> Result<String, ShareError> {
        let req = self
            .client
            .post(format!("{}/shares", self.base_url))
            .json(&FilesBody { files });
        let resp = self.auth(req).send().await.map_err(upstream)?;
        if !resp.status().is_success() {
            return Err(upstream(format!("service answered {}", resp.status())));
        }
        let body: CreatedBody = resp.json().await.map_err(upstream)?;
        if !is_safe_remote_id(&body.id) {
            return Err(upstream(format!("service returned unusable id {:?}", body.id)));
        }
        let pointers = self.pointers.clone();
        Ok(blocking(move || pointers.create_pointer(&body.id)).await?.id)
    }

    async fn fetch(&self, id: &str) -> Result<BTreeMap<String, String>, ShareError> {
        let pointers = self.pointers.clone();
        let key = id.to_string();
        let record = blocking(move || pointers.fetch(&key)).await?;
        let Some(remote) = record.remote else {
            return Ok(record.files);
        };
        let req = self.client.get(format!("{}/shares/{remote}", self.base_url));
        let resp = self.auth(req).send().await.map_err(upstream)?;
        if resp.status() == reqwest::StatusCode::NOT_FOUND {
            return Err(upstream(format!("service no longer has {remote}")));
        }
        if !resp.status().is_success() {
            return Err(upstream(format!("service answered {}", resp.status())));
        }
        let body: FilesBody = resp.json().await.map_err(upstream)?;
        Ok(body.files)
    }
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ShareError> + Send + 'static,
) -> Result<T, ShareError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ShareError::Io(std::io::Error::other(e)))?
}

impl ShareBackend {
    /// Directory holding the local records, pointer records included.
    pub fn dir(&self) -> &std::path::Path {
        match self {
            ShareBackend::Local(store) => store.dir(),
            ShareBackend::External(ext) => ext.pointers.dir(),
        }
    }

    /// Store `files` and return the new share id.
    pub async fn create(&self, files: BTreeMap<String, String>) -> Result<String, ShareError> {
        validate_files(&files)?;
        match self {
            ShareBackend::Local(store) => {
                let store = store.clone();
                blocking(move || store.create(files)).await.map(|r| r.id)
            }
            ShareBackend::External(ext) => ext.create(files).await,
        }
    }

    pub async fn fetch(&self, id: &str) -> Result<BTreeMap<String, String>, ShareError> {
        match self {
            ShareBackend::Local(store) => {
                let store = store.clone();
                let id = id.to_string();
                blocking(move || store.fetch(&id)).await.map(|r| r.files)
            }
            ShareBackend::External(ext) => ext.fetch(id).await,
        }
    }
}
