//! Name-resolved, type-checked view of a program.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use super::ast::{ProcedureBlock, Program, Quantifier};
use super::diagnostic::Diagnostic;
use super::span::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSig {
    pub args: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantSig {
    pub ty: String,
    pub span: Span,
}

/// Symbol table of one vocabulary block.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    pub name: String,
    pub types: IndexMap<String, Span>,
    pub predicates: IndexMap<String, PredicateSig>,
    pub constants: IndexMap<String, ConstantSig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TFormula {
    Bool(bool),
    Atom {
        pred: String,
        args: Vec<Term>,
    },
    Eq(Term, Term),
    Not(Box<TFormula>),
    And(Vec<TFormula>),
    Or(Vec<TFormula>),
    Implies(Box<TFormula>, Box<TFormula>),
    Equiv(Box<TFormula>, Box<TFormula>),
    Quant {
        q: Quantifier,
        vars: Vec<VarId>,
        body: Box<TFormula>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedSentence {
    /// 0-based position in its theory.
    pub index: usize,
    pub span: Span,
    /// Canonical text of the sentence, including the final `.`.
    pub text: String,
    /// Indexed by [`VarId`].
    pub vars: Vec<VarInfo>,
    pub formula: TFormula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedTheory {
    pub name: String,
    pub vocabulary: Arc<Vocabulary>,
    pub file: String,
    pub sentences: Vec<TypedSentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom {
            pred: pred.into(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            f.write_str(&self.pred)
        } else {
            write!(f, "{}({})", self.pred, self.args.join(","))
        }
    }
}

/// A validated structure block: domains for every type plus the atoms and
/// constants it fixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedStructure {
    pub name: String,
    pub vocabulary: Arc<Vocabulary>,
    pub file: String,
    pub domains: IndexMap<String, Vec<String>>,
    pub atoms: BTreeMap<GroundAtom, bool>,
    pub constants: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct TypedProgram {
    pub program: Program,
    pub vocabularies: IndexMap<String, Arc<Vocabulary>>,
    pub theories: IndexMap<String, TypedTheory>,
    pub structures: IndexMap<String, TypedStructure>,
    pub procedures: IndexMap<String, ProcedureBlock>,
    pub warnings: Vec<Diagnostic>,
}
