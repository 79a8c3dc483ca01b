use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::language::lexer::{is_ident_continue, is_ident_start};

/// Where the cursor lands after inserting a snippet body.
pub const CURSOR_MARK: &str = "$0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub trigger: String,
    pub body: String,
    pub description: String,
}

#[derive(Debug, Error)]
pub enum SnippetError {
    #[error("cannot read snippets: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid snippets file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("snippet trigger {0:?} is not an identifier")]
    BadTrigger(String),
}

impl Snippet {
    fn builtin(trigger: &str, description: &str, body: &str) -> Snippet {
        Snippet {
            trigger: trigger.to_string(),
            body: body.to_string(),
            description: description.to_string(),
        }
    }

    /// Body text without the cursor mark, and the cursor's char offset in it.
    pub fn expand(&self) -> (String, usize) {
        match self.body.find(CURSOR_MARK) {
            Some(i) => {
                let text = format!("{}{}", &self.body[..i], &self.body[i + CURSOR_MARK.len()..]);
                (text, self.body[..i].chars().count())
            }
            None => (self.body.clone(), self.body.chars().count()),
        }
    }
}

fn valid_trigger(t: &str) -> bool {
    let mut chars = t.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue)
}

pub fn builtin_snippets() -> Vec<Snippet> {
    vec![
        Snippet::builtin(
            "vocabulary",
            "vocabulary block",
            "vocabulary V {\n    type T\n    $0\n}",
        ),
        Snippet::builtin("theory", "theory block", "theory T : V {\n    $0\n}"),
        Snippet::builtin("structure", "structure block", "structure S : V {\n    T = { $0 }\n}"),
        Snippet::builtin("procedure", "procedure block", "procedure main() {\n    $0\n}"),
        // definitions are not executed; this is reference text for tutorials
        Snippet::builtin(
            "reachability",
            "inductive definition of reachability (text only)",
            "{\n    reach(x, y) <- edge(x, y).\n    reach(x, y) <- ?z: reach(x, z) & edge(z, y).\n}$0",
        ),
    ]
}

/// Parse a `snippets.json` array and check every trigger.
pub fn parse_snippets(json: &str) -> Result<Vec<Snippet>, SnippetError> {
    let snippets: Vec<Snippet> = serde_json::from_str(json)?;
    if let Some(bad) = snippets.iter().find(|s| !valid_trigger(&s.trigger)) {
        return Err(SnippetError::BadTrigger(bad.trigger.clone()));
    }
    Ok(snippets)
}

pub fn load_snippets(path: &Path) -> Result<Vec<Snippet>, SnippetError> {
    parse_snippets(&std::fs::read_to_string(path)?)
}
