//! Resource limits shared by the engine and run sessions.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Wall,
    Output,
    Killed,
    GroundAtoms,
    Decisions,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Wall => "wall",
            LimitKind::Output => "output",
            LimitKind::Killed => "killed",
            LimitKind::GroundAtoms => "ground_atoms",
            LimitKind::Decisions => "decisions",
        })
    }
}

/// Limits applied to one run. All values are positive; a `wall_ms` of
/// `u64::MAX` means no wall-clock limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLimits {
    pub wall_ms: u64,
    pub output_bytes_max: u64,
    pub max_models: u64,
    pub ground_atoms_max: u64,
    pub max_decisions: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("resource limit {0} must be positive")]
pub struct InvalidLimits(pub &'static str);

impl ResourceLimits {
    /// Limits for requests coming from the web.
    pub fn online() -> Self {
        ResourceLimits {
            wall_ms: 10_000,
            output_bytes_max: 1_048_576,
            ..Self::local()
        }
    }

    pub fn local() -> Self {
        let engine = EngineLimits::default();
        ResourceLimits {
            wall_ms: u64::MAX,
            output_bytes_max: 1_048_576,
            max_models: 100,
            ground_atoms_max: engine.ground_atoms_max as u64,
            max_decisions: engine.max_decisions,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidLimits> {
        let fields = [
            ("wall_ms", self.wall_ms),
            ("output_bytes_max", self.output_bytes_max),
            ("max_models", self.max_models),
            ("ground_atoms_max", self.ground_atoms_max),
            ("max_decisions", self.max_decisions),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(InvalidLimits(name)),
            None => Ok(()),
        }
    }

    pub fn engine(&self) -> EngineLimits {
        EngineLimits {
            ground_atoms_max: usize::try_from(self.ground_atoms_max).unwrap_or(usize::MAX),
            max_decisions: self.max_decisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineLimits {
    pub ground_atoms_max: usize,
    /// Per solver call.
    pub max_decisions: u64,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits {
            ground_atoms_max: 100_000,
            max_decisions: 1_000_000,
        }
    }
}

/// Cooperative cancellation, polled from the engine's inner loops.
pub trait Interrupt: Send + Sync {
    fn poll(&self) -> Option<LimitKind>;
}

/// Fires once a fixed instant has passed.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(pub Instant);

impl Interrupt for Deadline {
    fn poll(&self) -> Option<LimitKind> {
        (Instant::now() >= self.0).then_some(LimitKind::Wall)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        assert!(ResourceLimits::online().validate().is_ok());
        assert!(ResourceLimits::local().validate().is_ok());
        assert_eq!(ResourceLimits::online().wall_ms, 10_000);
        let mut l = ResourceLimits::online();
        l.max_models = 0;
        assert_eq!(l.validate(), Err(InvalidLimits("max_models")));
    }

    #[test]
    fn limit_kind_wire_names() {
        assert_eq!(
            serde_json::to_string(&LimitKind::GroundAtoms).unwrap(),
            "\"ground_atoms\""
        );
        assert_eq!(LimitKind::Wall.to_string(), "wall");
    }
}
