//! Display-only replacement of ASCII connectives by mathematical symbols.
//!
//! Offsets here count Unicode scalar values, matching what the editor
//! reports for cursor positions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::language::{tokenize, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMap {
    pairs: Vec<(String, String)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolMapError {
    #[error("symbol {0:?} is mapped twice")]
    Duplicate(String),
    #[error("symbol mappings must be nonempty")]
    Empty,
}

impl Default for SymbolMap {
    fn default() -> Self {
        let pairs = [
            ("!", "∀"),
            ("?", "∃"),
            ("<=>", "⇔"),
            ("=>", "⇒"),
            ("&", "∧"),
            ("|", "∨"),
            ("~", "¬"),
        ];
        SymbolMap {
            pairs: pairs.iter().map(|(a, d)| (a.to_string(), d.to_string())).collect(),
        }
    }
}

impl SymbolMap {
    /// Build a map from `(ascii, display)` pairs. Both sides must be unique.
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self, SymbolMapError> {
        for (i, (a, d)) in pairs.iter().enumerate() {
            if a.is_empty() || d.is_empty() {
                return Err(SymbolMapError::Empty);
            }
            if pairs[..i].iter().any(|(a2, _)| a2 == a) {
                return Err(SymbolMapError::Duplicate(a.clone()));
            }
            if pairs[..i].iter().any(|(_, d2)| d2 == d) {
                return Err(SymbolMapError::Duplicate(d.clone()));
            }
        }
        Ok(SymbolMap { pairs })
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// Display form of a whole logical token, if it has one.
    pub fn display(&self, ascii: &str) -> Option<&str> {
        self.pairs.iter().find(|(a, _)| a == ascii).map(|(_, d)| d.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Replacement {
    source_start: usize,
    source_len: usize,
    display_start: usize,
    display_len: usize,
}

/// Correspondence between source and display offsets after
/// [`replace_symbols`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionMap {
    replacements: Vec<Replacement>,
    originals: Vec<String>,
}

impl PositionMap {
    /// Source offset for a display offset. Offsets inside a replaced symbol
    /// map to the symbol's start.
    pub fn to_source(&self, display: usize) -> usize {
        let mut delta: isize = 0;
        for r in &self.replacements {
            if display < r.display_start {
                break;
            }
            if display < r.display_start + r.display_len {
                return r.source_start;
            }
            delta += r.source_len as isize - r.display_len as isize;
        }
        (display as isize + delta) as usize
    }

    pub fn to_display(&self, source: usize) -> usize {
        let mut delta: isize = 0;
        for r in &self.replacements {
            if source < r.source_start {
                break;
            }
            if source < r.source_start + r.source_len {
                return r.display_start;
            }
            delta += r.display_len as isize - r.source_len as isize;
        }
        (source as isize + delta) as usize
    }

    /// Undo the replacement on an unedited display text.
    pub fn restore(&self, display_text: &str) -> String {
        let chars: Vec<char> = display_text.chars().collect();
        let mut out = String::with_capacity(display_text.len());
        let mut at = 0;
        for (r, original) in self.replacements.iter().zip(&self.originals) {
            out.extend(&chars[at..r.display_start]);
            out.push_str(original);
            at = r.display_start + r.display_len;
        }
        out.extend(&chars[at.min(chars.len())..]);
        out
    }
}

/// Replace every logical token that has a display form. Comments, strings
/// and identifiers are never touched.
pub fn replace_symbols(text: &str, map: &SymbolMap) -> (String, PositionMap) {
    let mut out = String::with_capacity(text.len());
    let mut pm = PositionMap::default();
    let (mut source_at, mut display_at) = (0, 0);
    for t in tokenize(text) {
        let len = t.lexeme.chars().count();
        match map.display(&t.lexeme).filter(|_| t.kind == TokenKind::Logical) {
            Some(d) => {
                let dlen = d.chars().count();
                pm.replacements.push(Replacement {
                    source_start: source_at,
                    source_len: len,
                    display_start: display_at,
                    display_len: dlen,
                });
                pm.originals.push(t.lexeme.clone());
                out.push_str(d);
                display_at += dlen;
            }
            None => {
                out.push_str(&t.lexeme);
                display_at += len;
            }
        }
        source_at += len;
    }
    (out, pm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replaces_connectives() {
        let (d, pm) = replace_symbols("!x: p(x) => q(x).", &SymbolMap::default());
        assert_eq!(d, "∀x: p(x) ⇒ q(x).");
        assert_eq!(pm.restore(&d), "!x: p(x) => q(x).");
        // `q` sits at source 12, display 11
        assert_eq!(pm.to_source(11), 12);
        assert_eq!(pm.to_display(12), 11);
        assert_eq!(pm.to_source(0), 0);
        assert_eq!(pm.to_display(9), 9);
        assert_eq!(pm.to_display(10), 9);
    }

    #[test]
    fn comments_strings_and_comparisons_untouched() {
        let map = SymbolMap::default();
        for text in ["// a => b", "\"a & b\"", "x != y", "a <= b", "/* ~p */"] {
            assert_eq!(replace_symbols(text, &map).0, text);
        }
        assert_eq!(replace_symbols("p <=> ~q | r & s", &map).0, "p ⇔ ¬q ∨ r ∧ s");
    }

    #[test]
    fn rejects_non_injective_maps() {
        let pairs = vec![("!".to_string(), "A".to_string()), ("?".to_string(), "A".to_string())];
        assert_eq!(SymbolMap::new(pairs), Err(SymbolMapError::Duplicate("A".into())));
    }
}
