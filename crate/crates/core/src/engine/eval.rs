//! Direct truth evaluation in a total structure, with no SAT involved.

use crate::language::ast::Quantifier;
use crate::language::typed::{TFormula, Term, VarId};
use crate::language::{GroundAtom, TypedSentence};

use super::ground::Instantiation;
use super::structure::PartialStructure;

/// Split off the outermost block of universal quantifiers, merging nested
/// `!x: !y:` prefixes.
pub fn leading_universals(formula: &TFormula) -> (Vec<VarId>, &TFormula) {
    let mut vars = Vec::new();
    let mut f = formula;
    while let TFormula::Quant {
        q: Quantifier::Forall,
        vars: vs,
        body,
    } = f
    {
        vars.extend(vs.iter().copied());
        f = body;
    }
    (vars, f)
}

/// Truth of a sentence in `structure`. Unknown atoms and constants count as
/// false / unequal, so callers should pass total structures.
pub fn evaluate(sentence: &TypedSentence, structure: &PartialStructure) -> bool {
    let mut env = vec![None; sentence.vars.len()];
    eval(&sentence.formula, sentence, structure, &mut env)
}

/// Truth of one instantiation of a sentence's universal prefix.
pub fn evaluate_instantiation(sentence: &TypedSentence, inst: &Instantiation, structure: &PartialStructure) -> bool {
    let (vars, body) = leading_universals(&sentence.formula);
    let mut env = vec![None; sentence.vars.len()];
    for (v, (_, value)) in vars.iter().zip(&inst.substitution.0) {
        env[v.0] = Some(value.clone());
    }
    eval(body, sentence, structure, &mut env)
}

fn term_value(t: &Term, structure: &PartialStructure, env: &[Option<String>]) -> Option<String> {
    match t {
        Term::Var(v) => env[v.0].clone(),
        Term::Const(c) => structure.constants.get(c).cloned(),
    }
}

fn eval(f: &TFormula, s: &TypedSentence, st: &PartialStructure, env: &mut Vec<Option<String>>) -> bool {
    match f {
        TFormula::Bool(b) => *b,
        TFormula::Atom { pred, args } => {
            let args: Option<Vec<String>> = args.iter().map(|a| term_value(a, st, env)).collect();
            match args {
                Some(args) => st.atoms.get(&GroundAtom::new(pred.clone(), args)) == Some(&true),
                None => false,
            }
        }
        TFormula::Eq(a, b) => match (term_value(a, st, env), term_value(b, st, env)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        },
        TFormula::Not(x) => !eval(x, s, st, env),
        TFormula::And(xs) => xs.iter().all(|x| eval(x, s, st, env)),
        TFormula::Or(xs) => xs.iter().any(|x| eval(x, s, st, env)),
        TFormula::Implies(a, b) => !eval(a, s, st, env) || eval(b, s, st, env),
        TFormula::Equiv(a, b) => eval(a, s, st, env) == eval(b, s, st, env),
        TFormula::Quant { q, vars, body } => {
            let types: Vec<String> = vars.iter().map(|v| s.vars[v.0].ty.clone()).collect();
            let saved: Vec<Option<String>> = vars.iter().map(|v| env[v.0].clone()).collect();
            let mut result = *q == Quantifier::Forall;
            for tuple in st.tuples(&types) {
                for (v, value) in vars.iter().zip(tuple) {
                    env[v.0] = Some(value);
                }
                let b = eval(body, s, st, env);
                if b != result {
                    result = b;
                    break;
                }
            }
            for (v, old) in vars.iter().zip(saved) {
                env[v.0] = old;
            }
            result
        }
    }
}
