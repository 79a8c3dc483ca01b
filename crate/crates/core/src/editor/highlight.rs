use serde::{Deserialize, Serialize};

use crate::language::{Range, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HighlightClass {
    Keyword,
    Logical,
    Comment,
    Number,
    Identifier,
    String,
    Punctuation,
    Error,
}

impl HighlightClass {
    pub fn css_class(self) -> &'static str {
        match self {
            HighlightClass::Keyword => "keyword",
            HighlightClass::Logical => "logical",
            HighlightClass::Comment => "comment",
            HighlightClass::Number => "number",
            HighlightClass::Identifier => "identifier",
            HighlightClass::String => "string",
            HighlightClass::Punctuation => "punctuation",
            HighlightClass::Error => "error",
        }
    }

    pub fn of(kind: TokenKind) -> Option<HighlightClass> {
        Some(match kind {
            TokenKind::Keyword => HighlightClass::Keyword,
            TokenKind::Identifier => HighlightClass::Identifier,
            TokenKind::Logical => HighlightClass::Logical,
            TokenKind::Punct => HighlightClass::Punctuation,
            TokenKind::Number => HighlightClass::Number,
            TokenKind::String => HighlightClass::String,
            TokenKind::Comment => HighlightClass::Comment,
            TokenKind::Error => HighlightClass::Error,
            TokenKind::Whitespace => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightSpan {
    pub range: Range,
    pub class: HighlightClass,
}

/// One span per non-whitespace token, in document order.
pub fn classify(tokens: &[Token]) -> Vec<HighlightSpan> {
    tokens
        .iter()
        .filter_map(|t| {
            HighlightClass::of(t.kind).map(|class| HighlightSpan {
                range: t.span().range(),
                class,
            })
        })
        .collect()
}
