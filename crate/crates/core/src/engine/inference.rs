use crate::language::span::Span;
use crate::language::{Diagnostic, Severity, TypedStructure, TypedTheory};

use super::ground::{ground, GroundProblem, Substitution};
use super::sat::{Lit, SolveResult, Var};
use super::structure::PartialStructure;
use super::{Context, EngineError};

/// Up to `max_models` distinct total models extending `structure`, in the
/// order the solver finds them.
pub fn modelexpand(
    theory: &TypedTheory,
    structure: &TypedStructure,
    max_models: usize,
    ctx: &Context<'_>,
) -> Result<Vec<PartialStructure>, EngineError> {
    let problem = ground(theory, structure, ctx)?;
    let mut blocking: Vec<Vec<Lit>> = Vec::new();
    let mut models = Vec::new();
    while models.len() < max_models {
        ctx.check()?;
        let SolveResult::Sat(model) = problem.solve(None, &blocking, &[], ctx)? else {
            break;
        };
        blocking.push(
            (0..problem.model_vars())
                .map(|i| Lit::new(Var(i as u32), !model[i]))
                .collect(),
        );
        models.push(problem.structure_from_model(&model));
    }
    Ok(models)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    /// The input refined with every atom and constant that has the same value
    /// in all models.
    Refined(PartialStructure),
    /// No model exists.
    Inconsistent,
}

/// Compute the consequences of `theory` that `structure` leaves open.
pub fn propagate(
    theory: &TypedTheory,
    structure: &TypedStructure,
    ctx: &Context<'_>,
) -> Result<Propagation, EngineError> {
    let problem = ground(theory, structure, ctx)?;
    let SolveResult::Sat(first) = problem.solve(None, &[], &[], ctx)? else {
        return Ok(Propagation::Inconsistent);
    };
    // a candidate stays until some model disagrees with `first` on it
    let mut candidate: Vec<bool> = (0..problem.model_vars()).map(|i| is_open(&problem, i)).collect();
    for i in 0..problem.model_vars() {
        if !candidate[i] {
            continue;
        }
        let flip = Lit::new(Var(i as u32), !first[i]);
        match problem.solve(None, &[], &[flip], ctx)? {
            SolveResult::Sat(other) => {
                for j in i..problem.model_vars() {
                    if other[j] != first[j] {
                        candidate[j] = false;
                    }
                }
            }
            SolveResult::Unsat => {}
        }
    }
    let mut refined = problem.structure.clone();
    for (i, kind) in problem.vars[..problem.model_vars()].iter().enumerate() {
        if !candidate[i] {
            continue;
        }
        match kind {
            super::VarKind::Atom(a) => {
                refined.atoms.insert(a.clone(), first[i]);
            }
            super::VarKind::Constant { constant, element } if first[i] => {
                refined.constants.insert(constant.clone(), element.clone());
            }
            _ => {}
        }
    }
    Ok(Propagation::Refined(refined))
}

fn is_open(problem: &GroundProblem, var: usize) -> bool {
    match &problem.vars[var] {
        super::VarKind::Atom(a) => !problem.structure.atoms.contains_key(a),
        super::VarKind::Constant { constant, .. } => !problem.structure.constants.contains_key(constant),
        super::VarKind::Aux => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreItem {
    /// 0-based sentence index.
    pub sentence: usize,
    pub span: Span,
    pub sentence_text: String,
    pub substitution: Substitution,
}

/// A minimal set of sentence instantiations that together with the structure
/// has no model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsatCore {
    pub theory: String,
    pub structure: String,
    pub file: String,
    pub items: Vec<CoreItem>,
}

impl UnsatCore {
    /// One diagnostic per sentence that takes part in the core.
    pub fn to_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out: Vec<Diagnostic> = Vec::new();
        let mut sentences: Vec<usize> = self.items.iter().map(|i| i.sentence).collect();
        sentences.dedup();
        for s in sentences {
            let items: Vec<&CoreItem> = self.items.iter().filter(|i| i.sentence == s).collect();
            let n = items.len();
            let mut d = Diagnostic::new(
                Severity::Core,
                &self.file,
                items[0].span,
                format!(
                    "{} instantiation{} of this sentence conflict{} with structure {}",
                    n,
                    if n == 1 { "" } else { "s" },
                    if n == 1 { "s" } else { "" },
                    self.structure
                ),
            );
            d.instantiations = Some(items.iter().map(|i| i.substitution.to_string()).collect());
            out.push(d);
        }
        out
    }

    /// Shell rendering: one line per instantiation.
    pub fn render(&self) -> String {
        self.items
            .iter()
            .map(|i| {
                let sub = i.substitution.compact();
                if sub.is_empty() {
                    format!("sentence {}: {}", i.sentence + 1, i.sentence_text)
                } else {
                    format!("sentence {} [{}]: {}", i.sentence + 1, sub, i.sentence_text)
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Deletion-based core extraction over sentence instantiations. Structure
/// facts are never removed.
pub fn unsatcore(
    theory: &TypedTheory,
    structure: &TypedStructure,
    ctx: &Context<'_>,
) -> Result<UnsatCore, EngineError> {
    let problem = ground(theory, structure, ctx)?;
    if problem.solve(None, &[], &[], ctx)?.is_sat() {
        return Err(EngineError::Satisfiable);
    }
    let mut keep = vec![true; problem.instantiations.len()];
    for i in 0..keep.len() {
        keep[i] = false;
        if problem.solve(Some(&keep), &[], &[], ctx)?.is_sat() {
            keep[i] = true;
        }
    }
    let items = problem
        .instantiations
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(inst, _)| CoreItem {
            sentence: inst.sentence,
            span: inst.span,
            sentence_text: theory.sentences[inst.sentence].text.clone(),
            substitution: inst.substitution.clone(),
        })
        .collect();
    Ok(UnsatCore {
        theory: theory.name.clone(),
        structure: structure.name.clone(),
        file: theory.file.clone(),
        items,
    })
}
