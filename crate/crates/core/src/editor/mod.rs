//! Editing support: highlighting classes, connective display, indentation
//! and word completion.

mod completion;
mod highlight;
mod indent;
mod snippets;
mod symbols;

pub use completion::{completions, prefix_at, Completion, CompletionKind};
pub use highlight::{classify, HighlightClass, HighlightSpan};
pub use indent::{indent_line, reindent, INDENT_WIDTH};
pub use snippets::{builtin_snippets, load_snippets, parse_snippets, Snippet, SnippetError, CURSOR_MARK};
pub use symbols::{replace_symbols, PositionMap, SymbolMap, SymbolMapError};
