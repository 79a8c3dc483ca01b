//! Inference over a theory and a (partial) structure: grounding to
//! propositional clauses, a complete DPLL search, and the three inference
//! tasks built on it.

mod eval;
mod ground;
mod inference;
pub mod sat;
mod structure;

use thiserror::Error;

use crate::language::{TypedProgram, TypedStructure, TypedTheory};
use crate::limits::{EngineLimits, Interrupt, LimitKind};

pub use eval::{evaluate, evaluate_instantiation, leading_universals};
pub use ground::{ground, GroundProblem, Instantiation, Provenance, Substitution, VarKind};
pub use inference::{modelexpand, propagate, unsatcore, CoreItem, Propagation, UnsatCore};
pub use structure::{PartialStructure, Truth};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("resource limit exceeded: {0}")]
    Limit(LimitKind),
    #[error("the theory is satisfiable in this structure, so it has no unsat core")]
    Satisfiable,
    #[error("theory {theory} is over vocabulary {theory_vocabulary} but structure {structure} is over {structure_vocabulary}")]
    VocabularyMismatch {
        theory: String,
        theory_vocabulary: String,
        structure: String,
        structure_vocabulary: String,
    },
    #[error("unknown theory {0}")]
    UnknownTheory(String),
    #[error("unknown structure {0}")]
    UnknownStructure(String),
}

/// Limits and cancellation for one inference call.
#[derive(Clone, Copy, Default)]
pub struct Context<'a> {
    pub limits: EngineLimits,
    pub interrupt: Option<&'a dyn Interrupt>,
}

impl<'a> Context<'a> {
    pub fn new(limits: EngineLimits, interrupt: Option<&'a dyn Interrupt>) -> Self {
        Context { limits, interrupt }
    }

    pub fn check(&self) -> Result<(), EngineError> {
        match self.interrupt.and_then(|i| i.poll()) {
            Some(kind) => Err(EngineError::Limit(kind)),
            None => Ok(()),
        }
    }
}

/// Look up a theory and a structure by block name and check they share a
/// vocabulary.
pub fn lookup<'p>(
    program: &'p TypedProgram,
    theory: &str,
    structure: &str,
) -> Result<(&'p TypedTheory, &'p TypedStructure), EngineError> {
    let t = program
        .theories
        .get(theory)
        .ok_or_else(|| EngineError::UnknownTheory(theory.to_string()))?;
    let s = program
        .structures
        .get(structure)
        .ok_or_else(|| EngineError::UnknownStructure(structure.to_string()))?;
    check_vocabulary(t, s)?;
    Ok((t, s))
}

pub(crate) fn check_vocabulary(t: &TypedTheory, s: &TypedStructure) -> Result<(), EngineError> {
    if t.vocabulary.name != s.vocabulary.name {
        return Err(EngineError::VocabularyMismatch {
            theory: t.name.clone(),
            theory_vocabulary: t.vocabulary.name.clone(),
            structure: s.name.clone(),
            structure_vocabulary: s.vocabulary.name.clone(),
        });
    }
    Ok(())
}
