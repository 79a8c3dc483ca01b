use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::snippets::Snippet;
use crate::language::lexer::is_ident_continue;
use crate::language::{tokenize, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompletionKind {
    Snippet,
    Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub label: String,
    pub kind: CompletionKind,
    /// Text to insert in place of the prefix; snippets keep their `$0` mark.
    pub insert: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// The identifier characters immediately before `cursor` (a char offset).
pub fn prefix_at(document: &str, cursor: usize) -> String {
    let before: Vec<char> = document.chars().take(cursor).collect();
    let start = before.iter().rposition(|c| !is_ident_continue(*c)).map_or(0, |i| i + 1);
    before[start..].iter().collect()
}

/// Words of the document and snippet triggers that start with the prefix at
/// `cursor`. The word being typed is not offered back.
pub fn completions(document: &str, cursor: usize, snippets: &[Snippet]) -> Vec<Completion> {
    let prefix = prefix_at(document, cursor);
    let mut out: Vec<Completion> = Vec::new();
    let mut triggers = BTreeSet::new();
    let mut matching: Vec<&Snippet> = snippets.iter().filter(|s| s.trigger.starts_with(&prefix)).collect();
    matching.sort_by(|a, b| a.trigger.cmp(&b.trigger));
    for s in matching {
        if triggers.insert(s.trigger.clone()) {
            out.push(Completion {
                label: s.trigger.clone(),
                kind: CompletionKind::Snippet,
                insert: s.body.clone(),
                detail: Some(s.description.clone()),
            });
        }
    }

    let mut words = BTreeSet::new();
    let mut at = 0;
    for t in tokenize(document) {
        let len = t.lexeme.chars().count();
        let typing = at < cursor && cursor <= at + len;
        at += len;
        if typing || !matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) {
            continue;
        }
        if t.lexeme.starts_with(&prefix) && !triggers.contains(&t.lexeme) {
            words.insert(t.lexeme);
        }
    }
    out.extend(words.into_iter().map(|w| Completion {
        insert: w.clone(),
        label: w,
        kind: CompletionKind::Word,
        detail: None,
    }));
    out
}
