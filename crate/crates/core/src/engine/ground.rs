//! Grounding: instantiate every sentence over the structure's domains and
//! turn the result into clauses, tagging each clause with the sentence
//! instantiation it came from.

use std::collections::HashMap;
use std::fmt;

use crate::language::ast::Quantifier;
use crate::language::span::Span;
use crate::language::typed::{TFormula, Term};
use crate::language::{GroundAtom, TypedSentence, TypedStructure, TypedTheory};
use crate::limits::LimitKind;

use super::eval::leading_universals;
use super::sat::{self, Lit, SolveResult, Var};
use super::structure::PartialStructure;
use super::{check_vocabulary, Context, EngineError};

/// Clause literals allowed per ground atom before grounding gives up.
const LITERALS_PER_ATOM: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    Atom(GroundAtom),
    /// True iff `constant` denotes `element`.
    Constant {
        constant: String,
        element: String,
    },
    /// Tseitin definition variable.
    Aux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// A fact fixed by the input structure.
    Structure,
    /// Every constant denotes exactly one element.
    Signature,
    /// Index into [`GroundProblem::instantiations`].
    Instance(usize),
}

/// Variable bindings of one instantiation, in quantifier order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution(pub Vec<(String, String)>);

impl Substitution {
    /// `x=penguin,y=eagle`, as printed by the shell.
    pub fn compact(&self) -> String {
        self.0
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(no variables)");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instantiation {
    /// 0-based sentence index.
    pub sentence: usize,
    pub span: Span,
    pub substitution: Substitution,
}

#[derive(Debug, Clone)]
pub struct GroundProblem {
    pub theory: String,
    pub file: String,
    pub structure: PartialStructure,
    pub vars: Vec<VarKind>,
    pub clauses: Vec<Vec<Lit>>,
    pub provenance: Vec<Provenance>,
    pub instantiations: Vec<Instantiation>,
    atom_vars: HashMap<GroundAtom, Var>,
    const_vars: HashMap<(String, String), Var>,
    model_vars: usize,
}

impl GroundProblem {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Atom and constant variables come first; everything after is auxiliary.
    pub fn model_vars(&self) -> usize {
        self.model_vars
    }

    pub fn atom_var(&self, atom: &GroundAtom) -> Option<Var> {
        self.atom_vars.get(atom).copied()
    }

    pub fn constant_var(&self, constant: &str, element: &str) -> Option<Var> {
        self.const_vars
            .get(&(constant.to_string(), element.to_string()))
            .copied()
    }

    /// Solve the clauses whose instantiation is kept (all when `keep` is
    /// `None`), plus `extra`.
    pub fn solve(
        &self,
        keep: Option<&[bool]>,
        extra: &[Vec<Lit>],
        assumptions: &[Lit],
        ctx: &Context<'_>,
    ) -> Result<SolveResult, EngineError> {
        let base = self
            .clauses
            .iter()
            .zip(&self.provenance)
            .filter(|(_, p)| match (p, keep) {
                (Provenance::Instance(i), Some(keep)) => keep[*i],
                _ => true,
            })
            .map(|(c, _)| c.as_slice());
        sat::solve(
            self.vars.len(),
            base.chain(extra.iter().map(Vec::as_slice)),
            assumptions,
            ctx,
        )
    }

    /// Read a total structure off a model.
    pub fn structure_from_model(&self, model: &[bool]) -> PartialStructure {
        let mut s = self.structure.clone();
        for (i, kind) in self.vars[..self.model_vars].iter().enumerate() {
            match kind {
                VarKind::Atom(a) => {
                    s.atoms.insert(a.clone(), model[i]);
                }
                VarKind::Constant { constant, element } if model[i] => {
                    s.constants.insert(constant.clone(), element.clone());
                }
                _ => {}
            }
        }
        s
    }

    fn new_var(&mut self, kind: VarKind) -> Var {
        let v = Var(self.vars.len() as u32);
        self.vars.push(kind);
        v
    }
}

/// Ground `theory` over `structure`.
pub fn ground(
    theory: &TypedTheory,
    structure: &TypedStructure,
    ctx: &Context<'_>,
) -> Result<GroundProblem, EngineError> {
    check_vocabulary(theory, structure)?;
    let base = PartialStructure::from(structure);
    let vocab = base.vocabulary.clone();
    let selector_count: usize = vocab.constants.values().map(|c| base.domain(&c.ty).len()).sum();
    if base.atom_count().saturating_add(selector_count) > ctx.limits.ground_atoms_max {
        return Err(EngineError::Limit(LimitKind::GroundAtoms));
    }
    let mut p = GroundProblem {
        theory: theory.name.clone(),
        file: theory.file.clone(),
        structure: base,
        vars: Vec::new(),
        clauses: Vec::new(),
        provenance: Vec::new(),
        instantiations: Vec::new(),
        atom_vars: HashMap::new(),
        const_vars: HashMap::new(),
        model_vars: 0,
    };
    for atom in p.structure.all_atoms() {
        let v = p.new_var(VarKind::Atom(atom.clone()));
        p.atom_vars.insert(atom, v);
    }
    for (name, sig) in &vocab.constants {
        for e in p.structure.domain(&sig.ty).to_vec() {
            let v = p.new_var(VarKind::Constant {
                constant: name.clone(),
                element: e.clone(),
            });
            p.const_vars.insert((name.clone(), e), v);
        }
    }
    p.model_vars = p.vars.len();

    let facts: Vec<Vec<Lit>> = p
        .structure
        .atoms
        .iter()
        .map(|(a, &v)| vec![Lit::new(p.atom_vars[a], v)])
        .chain(
            p.structure
                .constants
                .iter()
                .map(|(c, e)| vec![Lit::pos(p.const_vars[&(c.clone(), e.clone())])]),
        )
        .collect();
    for c in facts {
        p.clauses.push(c);
        p.provenance.push(Provenance::Structure);
    }
    for (name, sig) in &vocab.constants {
        let sels: Vec<Var> = p
            .structure
            .domain(&sig.ty)
            .iter()
            .map(|e| p.const_vars[&(name.clone(), e.clone())])
            .collect();
        p.clauses.push(sels.iter().map(|&v| Lit::pos(v)).collect());
        p.provenance.push(Provenance::Signature);
        for (i, &a) in sels.iter().enumerate() {
            for &b in &sels[i + 1..] {
                p.clauses.push(vec![Lit::neg(a), Lit::neg(b)]);
                p.provenance.push(Provenance::Signature);
            }
        }
    }

    let budget = p
        .structure
        .atom_count()
        .max(1)
        .saturating_mul(LITERALS_PER_ATOM)
        .max(1 << 16);
    let mut g = Grounder {
        p: &mut p,
        ctx,
        literals: 0,
        budget,
        steps: 0,
    };
    for sentence in &theory.sentences {
        g.sentence(sentence)?;
    }
    Ok(p)
}

/// Ground formula after constant folding.
#[derive(Debug, Clone)]
enum Gf {
    Const(bool),
    Lit(Lit),
    Not(Box<Gf>),
    And(Vec<Gf>),
    Or(Vec<Gf>),
    Equiv(Box<Gf>, Box<Gf>),
}

fn and(parts: impl IntoIterator<Item = Gf>) -> Gf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Gf::Const(true) => {}
            Gf::Const(false) => return Gf::Const(false),
            Gf::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Gf::Const(true),
        1 => out.pop().unwrap(),
        _ => Gf::And(out),
    }
}

fn or(parts: impl IntoIterator<Item = Gf>) -> Gf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Gf::Const(false) => {}
            Gf::Const(true) => return Gf::Const(true),
            Gf::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Gf::Const(false),
        1 => out.pop().unwrap(),
        _ => Gf::Or(out),
    }
}

fn not(g: Gf) -> Gf {
    match g {
        Gf::Const(b) => Gf::Const(!b),
        Gf::Lit(l) => Gf::Lit(!l),
        Gf::Not(inner) => *inner,
        other => Gf::Not(Box::new(other)),
    }
}

fn equiv(a: Gf, b: Gf) -> Gf {
    match (a, b) {
        (Gf::Const(true), x) | (x, Gf::Const(true)) => x,
        (Gf::Const(false), x) | (x, Gf::Const(false)) => not(x),
        (a, b) => Gf::Equiv(Box::new(a), Box::new(b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
    Both,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Both => Polarity::Both,
        }
    }

    fn pos(self) -> bool {
        self != Polarity::Neg
    }

    fn neg(self) -> bool {
        self != Polarity::Pos
    }
}

enum TermValue {
    Known(String),
    /// A constant the structure leaves open.
    Open(String),
}

struct Grounder<'a, 'c> {
    p: &'a mut GroundProblem,
    ctx: &'a Context<'c>,
    literals: usize,
    budget: usize,
    steps: u64,
}

impl Grounder<'_, '_> {
    fn tick(&mut self) -> Result<(), EngineError> {
        self.steps += 1;
        if self.steps.is_multiple_of(1024) {
            self.ctx.check()?;
        }
        Ok(())
    }

    fn sentence(&mut self, s: &TypedSentence) -> Result<(), EngineError> {
        let (vars, body) = leading_universals(&s.formula);
        let types: Vec<String> = vars.iter().map(|v| s.vars[v.0].ty.clone()).collect();
        let mut env: Vec<Option<String>> = vec![None; s.vars.len()];
        for tuple in self.p.structure.tuples(&types) {
            self.tick()?;
            let substitution = Substitution(
                vars.iter()
                    .zip(&tuple)
                    .map(|(v, e)| (s.vars[v.0].name.clone(), e.clone()))
                    .collect(),
            );
            for (v, e) in vars.iter().zip(tuple) {
                env[v.0] = Some(e);
            }
            let id = self.p.instantiations.len();
            self.p.instantiations.push(Instantiation {
                sentence: s.index,
                span: s.span,
                substitution,
            });
            let g = self.formula(body, s, &mut env)?;
            self.top(g, Provenance::Instance(id))?;
        }
        Ok(())
    }

    fn term(&self, t: &Term, env: &[Option<String>]) -> TermValue {
        match t {
            Term::Var(v) => TermValue::Known(env[v.0].clone().expect("bound variable")),
            Term::Const(c) => match self.p.structure.constants.get(c) {
                Some(e) => TermValue::Known(e.clone()),
                None => TermValue::Open(c.clone()),
            },
        }
    }

    fn constant_domain(&self, c: &str) -> Vec<String> {
        let ty = &self.p.structure.vocabulary.constants[c].ty;
        self.p.structure.domain(ty).to_vec()
    }

    fn selector(&self, c: &str, e: &str) -> Gf {
        match self.p.const_vars.get(&(c.to_string(), e.to_string())) {
            Some(&v) => Gf::Lit(Lit::pos(v)),
            None => Gf::Const(false),
        }
    }

    fn atom(&self, atom: GroundAtom) -> Gf {
        match self.p.structure.atoms.get(&atom) {
            Some(&b) => Gf::Const(b),
            None => Gf::Lit(Lit::pos(self.p.atom_vars[&atom])),
        }
    }

    fn formula(&mut self, f: &TFormula, s: &TypedSentence, env: &mut Vec<Option<String>>) -> Result<Gf, EngineError> {
        self.tick()?;
        Ok(match f {
            TFormula::Bool(b) => Gf::Const(*b),
            TFormula::Atom { pred, args } => {
                let values: Vec<TermValue> = args.iter().map(|a| self.term(a, env)).collect();
                let mut open: Vec<String> = Vec::new();
                for v in &values {
                    if let TermValue::Open(c) = v {
                        if !open.contains(c) {
                            open.push(c.clone());
                        }
                    }
                }
                if open.is_empty() {
                    let args = values
                        .into_iter()
                        .map(|v| match v {
                            TermValue::Known(e) => e,
                            TermValue::Open(_) => unreachable!(),
                        })
                        .collect();
                    self.atom(GroundAtom::new(pred.clone(), args))
                } else {
                    let doms: Vec<Vec<String>> = open.iter().map(|c| self.constant_domain(c)).collect();
                    let dom_refs: Vec<&Vec<String>> = doms.iter().collect();
                    let mut cases = Vec::new();
                    for choice in crate::language::resolve::cartesian(&dom_refs) {
                        let args = values
                            .iter()
                            .map(|v| match v {
                                TermValue::Known(e) => e.clone(),
                                TermValue::Open(c) => {
                                    let i = open.iter().position(|o| o == c).unwrap();
                                    choice[i].clone()
                                }
                            })
                            .collect();
                        let sels = open.iter().zip(&choice).map(|(c, e)| self.selector(c, e));
                        let atom = self.atom(GroundAtom::new(pred.clone(), args));
                        cases.push(and(sels.chain(std::iter::once(atom))));
                    }
                    or(cases)
                }
            }
            TFormula::Eq(a, b) => match (self.term(a, env), self.term(b, env)) {
                (TermValue::Known(x), TermValue::Known(y)) => Gf::Const(x == y),
                (TermValue::Open(c), TermValue::Known(e)) | (TermValue::Known(e), TermValue::Open(c)) => {
                    self.selector(&c, &e)
                }
                (TermValue::Open(c), TermValue::Open(d)) => {
                    if c == d {
                        Gf::Const(true)
                    } else {
                        let dom = self.constant_domain(&c);
                        or(dom.iter().map(|e| and([self.selector(&c, e), self.selector(&d, e)])))
                    }
                }
            },
            TFormula::Not(x) => not(self.formula(x, s, env)?),
            TFormula::And(xs) => {
                let mut parts = Vec::with_capacity(xs.len());
                for x in xs {
                    let g = self.formula(x, s, env)?;
                    if matches!(g, Gf::Const(false)) {
                        return Ok(g);
                    }
                    parts.push(g);
                }
                and(parts)
            }
            TFormula::Or(xs) => {
                let mut parts = Vec::with_capacity(xs.len());
                for x in xs {
                    let g = self.formula(x, s, env)?;
                    if matches!(g, Gf::Const(true)) {
                        return Ok(g);
                    }
                    parts.push(g);
                }
                or(parts)
            }
            TFormula::Implies(a, b) => {
                let a = self.formula(a, s, env)?;
                if matches!(a, Gf::Const(false)) {
                    return Ok(Gf::Const(true));
                }
                or([not(a), self.formula(b, s, env)?])
            }
            TFormula::Equiv(a, b) => {
                let a = self.formula(a, s, env)?;
                equiv(a, self.formula(b, s, env)?)
            }
            TFormula::Quant { q, vars, body } => {
                let types: Vec<String> = vars.iter().map(|v| s.vars[v.0].ty.clone()).collect();
                let saved: Vec<Option<String>> = vars.iter().map(|v| env[v.0].clone()).collect();
                let mut parts = Vec::new();
                let stop = Gf::Const(*q == Quantifier::Exists);
                let mut short = None;
                for tuple in self.p.structure.tuples(&types) {
                    for (v, e) in vars.iter().zip(tuple) {
                        env[v.0] = Some(e);
                    }
                    let g = self.formula(body, s, env)?;
                    if matches!((&g, &stop), (Gf::Const(a), Gf::Const(b)) if a == b) {
                        short = Some(g);
                        break;
                    }
                    parts.push(g);
                }
                for (v, old) in vars.iter().zip(saved) {
                    env[v.0] = old;
                }
                match (short, q) {
                    (Some(g), _) => g,
                    (None, Quantifier::Forall) => and(parts),
                    (None, Quantifier::Exists) => or(parts),
                }
            }
        })
    }

    fn push(&mut self, clause: Vec<Lit>, prov: Provenance) -> Result<(), EngineError> {
        self.literals += clause.len().max(1);
        if self.literals > self.budget {
            return Err(EngineError::Limit(LimitKind::GroundAtoms));
        }
        self.p.clauses.push(clause);
        self.p.provenance.push(prov);
        Ok(())
    }

    fn top(&mut self, g: Gf, prov: Provenance) -> Result<(), EngineError> {
        match g {
            Gf::Const(true) => Ok(()),
            Gf::Const(false) => self.push(Vec::new(), prov),
            Gf::And(parts) => parts.into_iter().try_for_each(|part| self.top(part, prov)),
            Gf::Or(parts) => {
                let mut clause = Vec::with_capacity(parts.len());
                for part in parts {
                    clause.push(self.encode(part, Polarity::Pos, prov)?);
                }
                self.push(clause, prov)
            }
            other => {
                let l = self.encode(other, Polarity::Pos, prov)?;
                self.push(vec![l], prov)
            }
        }
    }

    /// Literal equivalent to `g` in the directions `pol` requires.
    fn encode(&mut self, g: Gf, pol: Polarity, prov: Provenance) -> Result<Lit, EngineError> {
        match g {
            Gf::Lit(l) => Ok(l),
            Gf::Const(b) => {
                // only reachable for degenerate inputs; pin a fresh variable
                let v = self.p.new_var(VarKind::Aux);
                self.push(vec![Lit::new(v, b)], prov)?;
                Ok(Lit::pos(v))
            }
            Gf::Not(inner) => Ok(!self.encode(*inner, pol.flip(), prov)?),
            Gf::And(parts) => {
                let lits = parts
                    .into_iter()
                    .map(|p| self.encode(p, pol, prov))
                    .collect::<Result<Vec<_>, _>>()?;
                let v = Lit::pos(self.p.new_var(VarKind::Aux));
                if pol.pos() {
                    for &l in &lits {
                        self.push(vec![!v, l], prov)?;
                    }
                }
                if pol.neg() {
                    let mut c: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                    c.push(v);
                    self.push(c, prov)?;
                }
                Ok(v)
            }
            Gf::Or(parts) => {
                let lits = parts
                    .into_iter()
                    .map(|p| self.encode(p, pol, prov))
                    .collect::<Result<Vec<_>, _>>()?;
                let v = Lit::pos(self.p.new_var(VarKind::Aux));
                if pol.pos() {
                    let mut c = lits.clone();
                    c.push(!v);
                    self.push(c, prov)?;
                }
                if pol.neg() {
                    for &l in &lits {
                        self.push(vec![v, !l], prov)?;
                    }
                }
                Ok(v)
            }
            Gf::Equiv(a, b) => {
                let a = self.encode(*a, Polarity::Both, prov)?;
                let b = self.encode(*b, Polarity::Both, prov)?;
                let v = Lit::pos(self.p.new_var(VarKind::Aux));
                if pol.pos() {
                    self.push(vec![!v, !a, b], prov)?;
                    self.push(vec![!v, a, !b], prov)?;
                }
                if pol.neg() {
                    self.push(vec![v, a, b], prov)?;
                    self.push(vec![v, !a, !b], prov)?;
                }
                Ok(v)
            }
        }
    }
}
