//! Lossless tokenizer.
//!
//! Every byte of the input ends up in exactly one token, so concatenating the
//! lexemes reproduces the source. Characters the grammar does not know become
//! `Error` tokens instead of aborting the scan.

use serde::{Deserialize, Serialize};

use super::span::{Pos, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Logical,
    Punct,
    Number,
    String,
    Comment,
    Whitespace,
    Error,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Whitespace | TokenKind::Comment)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub col: u32,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl Token {
    pub fn start(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
            offset: self.offset,
        }
    }

    pub fn end(&self) -> Pos {
        self.start().advance(&self.lexeme)
    }

    pub fn span(&self) -> Span {
        Span::new(self.start(), self.end())
    }

    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

pub const KEYWORDS: &[&str] = &[
    "vocabulary",
    "theory",
    "structure",
    "procedure",
    "type",
    "if",
    "else",
    "while",
    "true",
    "false",
];

/// Connectives, longest first.
pub const LOGICAL: &[&str] = &["<=>", "=>", "!", "?", "&", "|", "~", "="];
/// Mathematical spellings of the connectives. The editor displays these; the
/// lexer accepts them so highlighting stays stable, but the parser does not.
pub const DISPLAY_LOGICAL: &[&str] = &["∀", "∃", "⇒", "⇔", "∧", "∨", "¬"];

const PUNCT_2: &[&str] = &[":=", "==", "!=", "<=", ">="];
const PUNCT_1: &str = "(){}[],;:.<>+-*/%";

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

pub fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = Pos::START;
    let mut rest = text;
    while !rest.is_empty() {
        let (kind, len) = scan(rest);
        debug_assert!(len > 0 && rest.is_char_boundary(len));
        let lexeme = &rest[..len];
        tokens.push(Token {
            kind,
            lexeme: lexeme.to_string(),
            line: pos.line,
            col: pos.col,
            offset: pos.offset,
        });
        pos = pos.advance(lexeme);
        rest = &rest[len..];
    }
    tokens
}

/// Kind and byte length of the token at the start of `s` (nonempty).
fn scan(s: &str) -> (TokenKind, usize) {
    let mut chars = s.char_indices();
    let (_, c) = chars.next().expect("scan on empty input");

    if c.is_whitespace() {
        let len = s.find(|c: char| !c.is_whitespace()).unwrap_or(s.len());
        return (TokenKind::Whitespace, len);
    }
    if s.starts_with("//") {
        return (TokenKind::Comment, s.find('\n').unwrap_or(s.len()));
    }
    if let Some(body) = s.strip_prefix("/*") {
        return match body.find("*/") {
            Some(i) => (TokenKind::Comment, i + 4),
            // unterminated: the parser reports it
            None => (TokenKind::Error, s.len()),
        };
    }
    if c == '"' {
        return scan_string(s);
    }
    if c.is_ascii_digit() {
        let len = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
        return (TokenKind::Number, len);
    }
    if is_ident_start(c) {
        let len = s
            .char_indices()
            .find(|&(_, c)| !is_ident_continue(c))
            .map(|(i, _)| i)
            .unwrap_or(s.len());
        let kind = if is_keyword(&s[..len]) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        return (kind, len);
    }
    if s.starts_with("<=>") {
        return (TokenKind::Logical, 3);
    }
    if let Some(p) = PUNCT_2.iter().find(|p| s.starts_with(**p)) {
        return (TokenKind::Punct, p.len());
    }
    if let Some(l) = LOGICAL.iter().chain(DISPLAY_LOGICAL).find(|l| s.starts_with(**l)) {
        return (TokenKind::Logical, l.len());
    }
    if PUNCT_1.contains(c) {
        return (TokenKind::Punct, 1);
    }
    (TokenKind::Error, c.len_utf8())
}

/// Strings run to the closing quote; backslash escapes the next character.
/// An unterminated string becomes an error token ending before the newline.
fn scan_string(s: &str) -> (TokenKind, usize) {
    let mut escaped = false;
    for (i, c) in s.char_indices().skip(1) {
        match c {
            '\n' => return (TokenKind::Error, i),
            '\\' if !escaped => escaped = true,
            '"' if !escaped => return (TokenKind::String, i + 1),
            _ => escaped = false,
        }
    }
    (TokenKind::Error, s.len())
}

/// Decode the body of a string literal token.
pub fn unescape(lexeme: &str) -> String {
    let inner = lexeme
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(lexeme);
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
