use serde::{Deserialize, Serialize};

/// A position in a source document.
///
/// `line` and `col` are 1-based and count Unicode scalar values; `offset` is
/// the byte offset into the UTF-8 text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
    pub offset: usize,
}

impl Pos {
    pub const START: Pos = Pos {
        line: 1,
        col: 1,
        offset: 0,
    };

    /// Advance over `text`.
    pub fn advance(mut self, text: &str) -> Pos {
        for c in text.chars() {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        self.offset += text.len();
        self
    }
}

/// Half-open source range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        Span { start, end }
    }

    pub fn point(at: Pos) -> Self {
        Span { start: at, end: at }
    }

    /// Smallest span covering both.
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    pub fn range(&self) -> Range {
        Range {
            line: self.start.line,
            col: self.start.col,
            end_line: self.end.line,
            end_col: self.end.col,
        }
    }

    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        source.get(self.start.offset..self.end.offset).unwrap_or("")
    }
}

/// Wire form of a span: 1-based, start inclusive, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Range {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Range {
    pub fn start(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    pub fn end(&self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }
}
