//! The knowledge-base language: tokens, syntax tree, parser, printer and
//! resolver. Both the engine and the editor services read the language only
//! through this module.

pub mod ast;
pub mod diagnostic;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod resolve;
pub mod span;
pub mod typed;

pub use ast::Program;
pub use diagnostic::{Diagnostic, Severity};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_commands};
pub use printer::print_program;
pub use resolve::{check_files, resolve};
pub use span::{Pos, Range, Span};
pub use typed::{GroundAtom, TypedProgram, TypedSentence, TypedStructure, TypedTheory, Vocabulary};
