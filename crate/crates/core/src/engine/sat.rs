//! Complete DPLL search: unit propagation over two watched literals and
//! chronological backtracking. No learning, no restarts.
//!
//! Variables are decided in index order, negative phase first, so a given
//! clause set always yields the same model.

use std::fmt;
use std::ops::Not;

use super::{Context, EngineError};
use crate::limits::LimitKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A literal, encoded as `var << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: Var) -> Lit {
        Lit(v.0 << 1)
    }

    pub fn neg(v: Var) -> Lit {
        Lit(v.0 << 1 | 1)
    }

    pub fn new(v: Var, positive: bool) -> Lit {
        if positive {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg() {
            write!(f, "-{}", self.var().0 + 1)
        } else {
            write!(f, "{}", self.var().0 + 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// Value of every variable.
    Sat(Vec<bool>),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

struct Level {
    trail_start: usize,
    decision: Lit,
    flipped: bool,
    assumption: bool,
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    trail: Vec<Lit>,
    levels: Vec<Level>,
    qhead: usize,
    cursor: usize,
    units: Vec<Lit>,
    has_empty: bool,
}

/// Decide satisfiability of `clauses` over `num_vars` variables under the
/// given assumptions.
pub fn solve<'c>(
    num_vars: usize,
    clauses: impl IntoIterator<Item = &'c [Lit]>,
    assumptions: &[Lit],
    ctx: &Context<'_>,
) -> Result<SolveResult, EngineError> {
    let mut s = Solver::new(num_vars, clauses);
    s.search(assumptions, ctx)
}

impl Solver {
    fn new<'c>(num_vars: usize, input: impl IntoIterator<Item = &'c [Lit]>) -> Self {
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); num_vars * 2],
            assign: vec![None; num_vars],
            trail: Vec::with_capacity(num_vars),
            levels: Vec::new(),
            qhead: 0,
            cursor: 0,
            units: Vec::new(),
            has_empty: false,
        };
        for clause in input {
            let mut c: Vec<Lit> = clause.to_vec();
            c.sort_unstable();
            c.dedup();
            if c.windows(2).any(|w| w[0].var() == w[1].var()) {
                continue; // tautology
            }
            match c.len() {
                0 => s.has_empty = true,
                1 => s.units.push(c[0]),
                _ => {
                    let idx = s.clauses.len();
                    s.watches[c[0].code()].push(idx);
                    s.watches[c[1].code()].push(idx);
                    s.clauses.push(c);
                }
            }
        }
        s
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        self.assign[lit.var().index()].map(|b| b != lit.is_neg())
    }

    fn enqueue(&mut self, lit: Lit) {
        self.assign[lit.var().index()] = Some(!lit.is_neg());
        self.trail.push(lit);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead];
            self.qhead += 1;
            let watchers = std::mem::take(&mut self.watches[falsified.code()]);
            let mut keep = Vec::with_capacity(watchers.len());
            let mut conflict = false;
            let mut iter = watchers.into_iter();
            for ci in iter.by_ref() {
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let first_val = self.assign[first.var().index()].map(|b| b != first.is_neg());
                if first_val == Some(true) {
                    keep.push(ci);
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| {
                    let l = clause[k];
                    self.assign[l.var().index()].map(|b| b != l.is_neg()) != Some(false)
                });
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let new_watch = clause[1];
                    self.watches[new_watch.code()].push(ci);
                    continue;
                }
                keep.push(ci);
                if first_val == Some(false) {
                    conflict = true;
                    break;
                }
                self.enqueue(first);
            }
            keep.extend(iter);
            self.watches[falsified.code()].extend(keep);
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, trail_len: usize) {
        while self.trail.len() > trail_len {
            let lit = self.trail.pop().unwrap();
            let v = lit.var().index();
            self.assign[v] = None;
            self.cursor = self.cursor.min(v);
        }
        self.qhead = trail_len;
    }

    /// Flip the most recent unflipped decision. False when the search space
    /// (above the assumptions) is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.pop() {
            self.undo_to(level.trail_start);
            if level.assumption {
                return false;
            }
            if !level.flipped {
                self.levels.push(Level {
                    trail_start: self.trail.len(),
                    decision: !level.decision,
                    flipped: true,
                    assumption: false,
                });
                self.enqueue(!level.decision);
                return true;
            }
        }
        false
    }

    fn search(&mut self, assumptions: &[Lit], ctx: &Context<'_>) -> Result<SolveResult, EngineError> {
        if self.has_empty {
            return Ok(SolveResult::Unsat);
        }
        for i in 0..self.units.len() {
            let u = self.units[i];
            match self.value(u) {
                Some(false) => return Ok(SolveResult::Unsat),
                Some(true) => {}
                None => self.enqueue(u),
            }
        }
        let mut next_assumption = 0;
        let mut decisions: u64 = 0;
        let mut conflicts: u64 = 0;
        loop {
            if !self.propagate() {
                conflicts += 1;
                if conflicts.is_multiple_of(1024) {
                    ctx.check()?;
                }
                if !self.backtrack() {
                    return Ok(SolveResult::Unsat);
                }
                continue;
            }
            if next_assumption < assumptions.len() {
                let a = assumptions[next_assumption];
                next_assumption += 1;
                match self.value(a) {
                    Some(true) => {}
                    Some(false) => return Ok(SolveResult::Unsat),
                    None => {
                        self.levels.push(Level {
                            trail_start: self.trail.len(),
                            decision: a,
                            flipped: true,
                            assumption: true,
                        });
                        self.enqueue(a);
                    }
                }
                continue;
            }
            while self.cursor < self.assign.len() && self.assign[self.cursor].is_some() {
                self.cursor += 1;
            }
            if self.cursor == self.assign.len() {
                let model = self.assign.iter().map(|v| v.unwrap_or(false)).collect();
                return Ok(SolveResult::Sat(model));
            }
            decisions += 1;
            if decisions > ctx.limits.max_decisions {
                return Err(EngineError::Limit(LimitKind::Decisions));
            }
            if decisions.is_multiple_of(256) {
                ctx.check()?;
            }
            let lit = Lit::neg(Var(self.cursor as u32));
            self.levels.push(Level {
                trail_start: self.trail.len(),
                decision: lit,
                flipped: false,
                assumption: false,
            });
            self.enqueue(lit);
        }
    }
}
