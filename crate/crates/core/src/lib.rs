//! Language front end, inference engine, editor services, run sessions and
//! share storage for the knowledge-base IDE.

pub mod editor;
pub mod engine;
pub mod language;
pub mod limits;
pub mod session;
pub mod share;

pub use engine::{EngineError, PartialStructure, UnsatCore};
pub use language::{check_files, Diagnostic, Range, Severity};
pub use limits::{LimitKind, ResourceLimits};
pub use session::{spawn_run, RunControl, RunHandle, RunMode, SessionEvent, SourceFile, VizCommand};
pub use share::{LocalShareStore, ShareError, ShareRecord};
