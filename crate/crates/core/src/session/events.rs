use serde::{Deserialize, Serialize};

use crate::limits::LimitKind;

/// Messages a run emits, in order. Every run ends with exactly one `Exit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SessionEvent {
    Stdout { data: String },
    Stderr { data: String },
    Ask { prompt: String },
    Viz { commands: Vec<VizCommand> },
    Limit { kind: LimitKind },
    Exit { code: i32 },
}

impl SessionEvent {
    pub fn is_exit(&self) -> bool {
        matches!(self, SessionEvent::Exit { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum VizCommand {
    Grid { width: u32, height: u32 },
    Cell { x: u32, y: u32, color: String },
    Label { x: u32, y: u32, text: String },
}

impl VizCommand {
    /// Rough wire size, charged against the output budget.
    pub(crate) fn cost(&self) -> u64 {
        match self {
            VizCommand::Grid { .. } => 16,
            VizCommand::Cell { color, .. } => 16 + color.len() as u64,
            VizCommand::Label { text, .. } => 16 + text.len() as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Main,
    Shell,
}

/// A named source file handed to a run or a check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub name: String,
    pub content: String,
}

impl SourceFile {
    pub fn new(name: impl Into<String>, content: impl Into<String>) -> Self {
        SourceFile {
            name: name.into(),
            content: content.into(),
        }
    }
}

/// Whether a sequence of events is `(stdout|stderr|ask|viz|limit)* exit`.
pub fn well_formed(events: &[SessionEvent]) -> bool {
    match events.split_last() {
        Some((last, rest)) => last.is_exit() && !rest.iter().any(SessionEvent::is_exit),
        None => false,
    }
}
