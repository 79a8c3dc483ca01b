//! Tutorial bundles: an explanation pane coupled to example files.
//!
//! On disk a bundle is a directory `<id>/` holding `tutorial.json`
//! (`{"title": ...}`), `explanation.md` and any number of source files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TutorialBundle {
    pub id: String,
    pub title: String,
    pub explanation: String,
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TutorialSummary {
    pub id: String,
    pub title: String,
}

#[derive(Deserialize)]
struct Meta {
    title: String,
}

#[derive(Debug, Error)]
pub enum TutorialError {
    #[error("cannot read tutorials from {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid tutorial.json in {id}: {source}")]
    Meta { id: String, source: serde_json::Error },
}

const META: &str = "tutorial.json";
const EXPLANATION: &str = "explanation.md";

fn bundle(
    id: &str,
    meta: &str,
    explanation: &str,
    files: BTreeMap<String, String>,
) -> Result<TutorialBundle, TutorialError> {
    let meta: Meta = serde_json::from_str(meta).map_err(|source| TutorialError::Meta {
        id: id.to_string(),
        source,
    })?;
    let t = TutorialBundle {
        id: id.to_string(),
        title: meta.title,
        explanation: explanation.to_string(),
        files,
    };
    check(&t);
    Ok(t)
}

/// Problems in tutorial sources are logged, not fatal.
fn check(t: &TutorialBundle) {
    let (_, diags) = kbide_core::check_files(t.files.iter().map(|(n, c)| (n.as_str(), c.as_str())));
    for d in diags {
        tracing::warn!(tutorial = %t.id, "{d}");
    }
}

pub fn builtin() -> Vec<TutorialBundle> {
    let penguin = BTreeMap::from([(
        "penguin.kb".to_string(),
        include_str!("../tutorials/penguin/penguin.kb").to_string(),
    )]);
    let lights = BTreeMap::from([(
        "lights.kb".to_string(),
        include_str!("../tutorials/lights-out/lights.kb").to_string(),
    )]);
    [
        bundle(
            "penguin",
            include_str!("../tutorials/penguin/tutorial.json"),
            include_str!("../tutorials/penguin/explanation.md"),
            penguin,
        ),
        bundle(
            "lights-out",
            include_str!("../tutorials/lights-out/tutorial.json"),
            include_str!("../tutorials/lights-out/explanation.md"),
            lights,
        ),
    ]
    .into_iter()
    .map(|b| b.expect("built-in tutorial metadata is valid"))
    .collect()
}

/// Load every bundle under `dir`, sorted by id. Subdirectories without a
/// `tutorial.json` are skipped.
pub fn load_dir(dir: &Path) -> Result<Vec<TutorialBundle>, TutorialError> {
    let io = |source| TutorialError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let entry = entry.map_err(io)?;
        let path = entry.path();
        let id = entry.file_name().to_string_lossy().into_owned();
        if !path.is_dir() || id.starts_with('.') {
            continue;
        }
        let Ok(meta) = std::fs::read_to_string(path.join(META)) else {
            tracing::warn!(dir = %path.display(), "skipping tutorial without {META}");
            continue;
        };
        let explanation = std::fs::read_to_string(path.join(EXPLANATION)).unwrap_or_default();
        let mut files = BTreeMap::new();
        for f in std::fs::read_dir(&path).map_err(io)? {
            let f = f.map_err(io)?;
            let name = f.file_name().to_string_lossy().into_owned();
            if name == META || name == EXPLANATION || name.starts_with('.') || !f.path().is_file() {
                continue;
            }
            files.insert(name, std::fs::read_to_string(f.path()).map_err(io)?);
        }
        out.push(bundle(&id, &meta, &explanation, files)?);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

pub fn summaries(all: &[TutorialBundle]) -> Vec<TutorialSummary> {
    all.iter()
        .map(|t| TutorialSummary {
            id: t.id.clone(),
            title: t.title.clone(),
        })
        .collect()
}
