//! Random small knowledge bases and brute-force oracles for checking the
//! engine. Shared with the server's acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Duration;

use kbide_core::engine::{self, Context, Propagation};
use kbide_core::language::ast::Quantifier;
use kbide_core::language::typed::{TFormula, Term, VarId};
use kbide_core::language::{check_files, GroundAtom, TypedProgram, TypedSentence};
use rand::Rng;

/// Keeps brute-force enumeration at or below this many completions.
pub const MAX_COMPLETIONS: usize = 1024;

/// Generate the source of a random instance with a vocabulary `V`, a theory
/// `T` and a structure `S`.
pub fn random_source(rng: &mut impl Rng) -> String {
    let elements = [["a", "b", "c"], ["d", "e", "f"]];
    let type_count = rng.random_range(1..=2usize);
    let domains: Vec<Vec<&str>> = (0..type_count)
        .map(|t| elements[t][..rng.random_range(1..=3usize)].to_vec())
        .collect();
    let preds: Vec<Vec<usize>> = (0..rng.random_range(1..=3usize))
        .map(|_| {
            (0..rng.random_range(0..=2usize))
                .map(|_| rng.random_range(0..type_count))
                .collect()
        })
        .collect();
    let constant: Option<usize> = rng.random_bool(0.3).then(|| rng.random_range(0..type_count));

    let mut src = String::from("vocabulary V {\n");
    for t in 0..type_count {
        src += &format!("    type T{t}\n");
    }
    for (i, args) in preds.iter().enumerate() {
        if args.is_empty() {
            src += &format!("    p{i}\n");
        } else {
            let tys: Vec<String> = args.iter().map(|t| format!("T{t}")).collect();
            src += &format!("    p{i}({})\n", tys.join(", "));
        }
    }
    if let Some(t) = constant {
        src += &format!("    c0 : T{t}\n");
    }
    src += "}\n\ntheory T : V {\n";
    let mut gen = FormulaGen {
        preds: &preds,
        constant,
        type_count,
        next_var: 0,
    };
    for _ in 0..rng.random_range(1..=4usize) {
        let depth = rng.random_range(1..=3usize);
        let body = if rng.random_bool(0.6) {
            let mut scope = Vec::new();
            let vars = gen.fresh_vars(rng, &mut scope);
            format!("!{vars}: {}", gen.formula(rng, &mut scope, depth))
        } else {
            gen.formula(rng, &mut Vec::new(), depth)
        };
        src += &format!("    {body}.\n");
    }
    src += "}\n\nstructure S : V {\n";
    for (t, dom) in domains.iter().enumerate() {
        src += &format!("    T{t} = {{ {} }}\n", dom.join("; "));
    }

    // pick known atoms, then fix more until enumeration is small enough
    let mut atoms: Vec<(usize, Vec<&str>, Option<bool>)> = Vec::new();
    for (i, args) in preds.iter().enumerate() {
        let mut tuples: Vec<Vec<&str>> = vec![vec![]];
        for t in args {
            tuples = tuples
                .into_iter()
                .flat_map(|p| domains[*t].iter().map(move |e| [p.clone(), vec![*e]].concat()))
                .collect();
        }
        for tuple in tuples {
            let known = rng.random_bool(0.4).then(|| rng.random_bool(0.5));
            atoms.push((i, tuple, known));
        }
    }
    let constant_known = constant.map(|t| {
        rng.random_bool(0.5)
            .then(|| domains[t][rng.random_range(0..domains[t].len())])
    });
    let open_factor = match (constant, constant_known) {
        (Some(t), Some(None)) => domains[t].len(),
        _ => 1,
    };
    loop {
        let open: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].2.is_none()).collect();
        if open_factor << open.len() <= MAX_COMPLETIONS {
            break;
        }
        let pick = open[rng.random_range(0..open.len())];
        atoms[pick].2 = Some(rng.random_bool(0.5));
    }
    for (i, args) in preds.iter().enumerate() {
        let mine: Vec<&(usize, Vec<&str>, Option<bool>)> = atoms.iter().filter(|a| a.0 == i).collect();
        if args.is_empty() {
            if let Some(v) = mine[0].2 {
                src += &format!("    p{i} = {v}\n");
            }
            continue;
        }
        for (label, want) in [("ct", true), ("cf", false)] {
            let listed: Vec<String> = mine
                .iter()
                .filter(|a| a.2 == Some(want))
                .map(|a| a.1.join(","))
                .collect();
            if !listed.is_empty() {
                src += &format!("    p{i}<{label}> = {{ {} }}\n", listed.join("; "));
            }
        }
    }
    if let Some(Some(e)) = constant_known {
        src += &format!("    c0 = {e}\n");
    }
    src += "}\n";
    src
}

struct FormulaGen<'a> {
    preds: &'a [Vec<usize>],
    constant: Option<usize>,
    type_count: usize,
    next_var: usize,
}

impl FormulaGen<'_> {
    fn fresh_vars(&mut self, rng: &mut impl Rng, scope: &mut Vec<(String, usize)>) -> String {
        let n = rng.random_range(1..=2usize);
        let mut parts = Vec::new();
        for _ in 0..n {
            let name = format!("x{}", self.next_var);
            self.next_var += 1;
            let ty = rng.random_range(0..self.type_count);
            parts.push(format!("{name}[T{ty}]"));
            scope.push((name, ty));
        }
        parts.join(" ")
    }

    fn terms_of(&self, scope: &[(String, usize)], ty: usize) -> Vec<String> {
        let mut out: Vec<String> = scope.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect();
        if self.constant == Some(ty) {
            out.push("c0".to_string());
        }
        out
    }

    fn leaf(&self, rng: &mut impl Rng, scope: &[(String, usize)]) -> String {
        let usable: Vec<usize> = (0..self.preds.len())
            .filter(|&i| self.preds[i].iter().all(|&t| !self.terms_of(scope, t).is_empty()))
            .collect();
        if !usable.is_empty() && !rng.random_bool(0.15) {
            let i = usable[rng.random_range(0..usable.len())];
            if self.preds[i].is_empty() {
                return format!("p{i}");
            }
            let args: Vec<String> = self.preds[i]
                .iter()
                .map(|&t| {
                    let terms = self.terms_of(scope, t);
                    terms[rng.random_range(0..terms.len())].clone()
                })
                .collect();
            return format!("p{i}({})", args.join(", "));
        }
        let typed: Vec<usize> = (0..self.type_count)
            .filter(|&t| !self.terms_of(scope, t).is_empty())
            .collect();
        if let Some(&t) = typed.get(rng.random_range(0..typed.len().max(1))) {
            let terms = self.terms_of(scope, t);
            let a = &terms[rng.random_range(0..terms.len())];
            let b = &terms[rng.random_range(0..terms.len())];
            return format!("{a} = {b}");
        }
        if rng.random_bool(0.5) { "true" } else { "false" }.to_string()
    }

    fn formula(&mut self, rng: &mut impl Rng, scope: &mut Vec<(String, usize)>, depth: usize) -> String {
        if depth == 0 || rng.random_bool(0.3) {
            return self.leaf(rng, scope);
        }
        match rng.random_range(0..7) {
            0 => format!("~({})", self.formula(rng, scope, depth - 1)),
            k @ 1..=4 => {
                let op = ["&", "|", "=>", "<=>"][k - 1];
                let a = self.formula(rng, scope, depth - 1);
                let b = self.formula(rng, scope, depth - 1);
                format!("({a}) {op} ({b})")
            }
            k => {
                let q = if k == 5 { "!" } else { "?" };
                let mark = scope.len();
                let vars = self.fresh_vars(rng, scope);
                let body = self.formula(rng, scope, depth - 1);
                scope.truncate(mark);
                format!("({q}{vars}: {body})")
            }
        }
    }
}

/// A total interpretation: every atom and every constant has a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Total {
    pub atoms: BTreeMap<GroundAtom, bool>,
    pub constants: BTreeMap<String, String>,
}

pub struct Oracle<'p> {
    pub program: &'p TypedProgram,
    pub theory: &'p str,
    pub structure: &'p str,
}

impl<'p> Oracle<'p> {
    fn sentences(&self) -> &'p [TypedSentence] {
        &self.program.theories[self.theory].sentences
    }

    fn domain(&self, ty: &str) -> &'p [String] {
        &self.program.structures[self.structure].domains[ty]
    }

    /// Every total interpretation extending the structure, in no particular
    /// order.
    pub fn completions(&self) -> Vec<Total> {
        let s = &self.program.structures[self.structure];
        let vocab = &s.vocabulary;
        let mut open_atoms = Vec::new();
        for (name, sig) in &vocab.predicates {
            for tuple in product(sig.args.iter().map(|t| s.domains[t].clone()).collect()) {
                let atom = GroundAtom::new(name.clone(), tuple);
                if !s.atoms.contains_key(&atom) {
                    open_atoms.push(atom);
                }
            }
        }
        let open_constants: Vec<(String, Vec<String>)> = vocab
            .constants
            .iter()
            .filter(|(n, _)| !s.constants.contains_key(*n))
            .map(|(n, sig)| (n.clone(), s.domains[&sig.ty].clone()))
            .collect();
        let mut out = Vec::new();
        for choice in product(open_constants.iter().map(|(_, d)| d.clone()).collect()) {
            for bits in 0u64..1 << open_atoms.len() {
                let mut atoms = s.atoms.clone();
                for (i, a) in open_atoms.iter().enumerate() {
                    atoms.insert(a.clone(), bits >> i & 1 == 1);
                }
                let mut constants = s.constants.clone();
                for ((n, _), e) in open_constants.iter().zip(&choice) {
                    constants.insert(n.clone(), e.clone());
                }
                out.push(Total { atoms, constants });
            }
        }
        out
    }

    pub fn models(&self) -> BTreeSet<Total> {
        self.completions()
            .into_iter()
            .filter(|t| {
                self.sentences()
                    .iter()
                    .all(|s| self.holds(s, &s.formula, t, &mut HashMap::new()))
            })
            .collect()
    }

    /// All (sentence, prefix values) instantiations, in the order grounding
    /// produces them.
    pub fn instantiations(&self) -> Vec<(usize, Vec<String>)> {
        let mut out = Vec::new();
        for s in self.sentences() {
            let (vars, _) = prefix(&s.formula);
            let doms = vars.iter().map(|v| self.domain(&s.vars[v.0].ty).to_vec()).collect();
            for values in product(doms) {
                out.push((s.index, values));
            }
        }
        out
    }

    pub fn instantiation_holds(&self, sentence: usize, values: &[String], t: &Total) -> bool {
        let s = &self.sentences()[sentence];
        let (vars, body) = prefix(&s.formula);
        let mut env: HashMap<VarId, String> = vars.iter().copied().zip(values.iter().cloned()).collect();
        self.holds(s, body, t, &mut env)
    }

    /// Whether some completion satisfies every listed instantiation.
    pub fn satisfiable(&self, insts: &[(usize, Vec<String>)]) -> bool {
        self.completions()
            .iter()
            .any(|t| insts.iter().all(|(s, v)| self.instantiation_holds(*s, v, t)))
    }

    fn holds(&self, s: &TypedSentence, f: &TFormula, t: &Total, env: &mut HashMap<VarId, String>) -> bool {
        let value = |term: &Term, env: &HashMap<VarId, String>| match term {
            Term::Var(v) => env[v].clone(),
            Term::Const(c) => t.constants[c].clone(),
        };
        match f {
            TFormula::Bool(b) => *b,
            TFormula::Atom { pred, args } => {
                let args = args.iter().map(|a| value(a, env)).collect();
                t.atoms[&GroundAtom::new(pred.clone(), args)]
            }
            TFormula::Eq(a, b) => value(a, env) == value(b, env),
            TFormula::Not(x) => !self.holds(s, x, t, env),
            TFormula::And(xs) => xs.iter().all(|x| self.holds(s, x, t, env)),
            TFormula::Or(xs) => xs.iter().any(|x| self.holds(s, x, t, env)),
            TFormula::Implies(a, b) => !self.holds(s, a, t, env) || self.holds(s, b, t, env),
            TFormula::Equiv(a, b) => self.holds(s, a, t, env) == self.holds(s, b, t, env),
            TFormula::Quant { q, vars, body } => {
                let doms = vars.iter().map(|v| self.domain(&s.vars[v.0].ty).to_vec()).collect();
                let mut results = product(doms).into_iter().map(|values| {
                    let mut inner = env.clone();
                    inner.extend(vars.iter().copied().zip(values));
                    self.holds(s, body, t, &mut inner)
                });
                match q {
                    Quantifier::Forall => results.all(|b| b),
                    Quantifier::Exists => results.any(|b| b),
                }
            }
        }
    }
}

fn prefix(f: &TFormula) -> (Vec<VarId>, &TFormula) {
    let mut vars = Vec::new();
    let mut f = f;
    while let TFormula::Quant {
        q: Quantifier::Forall,
        vars: vs,
        body,
    } = f
    {
        vars.extend(vs);
        f = body;
    }
    (vars, f)
}

fn product(domains: Vec<Vec<String>>) -> Vec<Vec<String>> {
    domains.into_iter().fold(vec![vec![]], |acc, d| {
        acc.into_iter()
            .flat_map(|p| d.iter().map(move |e| [p.clone(), vec![e.clone()]].concat()))
            .collect()
    })
}

/// Outcome of checking one instance against the oracles.
#[derive(Debug, Default)]
pub struct Check {
    pub models_match: bool,
    pub backbone_match: bool,
    /// `None` when the instance is satisfiable.
    pub core_minimal: Option<bool>,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.models_match && self.backbone_match && self.core_minimal != Some(false)
    }
}

pub fn parse_instance(source: &str) -> TypedProgram {
    let (program, diags) = check_files([("random.kb", source)]);
    program.unwrap_or_else(|| panic!("generated instance does not check: {diags:?}\n{source}"))
}

/// Compare modelexpand, propagate and unsatcore against brute force.
pub fn check_instance(source: &str) -> Check {
    let program = parse_instance(source);
    let oracle = Oracle {
        program: &program,
        theory: "T",
        structure: "S",
    };
    let theory = &program.theories["T"];
    let structure = &program.structures["S"];
    let ctx = Context::default();
    let mut check = Check::default();

    let expected = oracle.models();
    let got: BTreeSet<Total> = engine::modelexpand(theory, structure, MAX_COMPLETIONS + 1, &ctx)
        .expect("modelexpand")
        .into_iter()
        .map(|m| Total {
            atoms: m.atoms,
            constants: m.constants,
        })
        .collect();
    check.models_match = got == expected;
    if !check.models_match {
        check.detail += &format!("models: engine {} vs oracle {}\n", got.len(), expected.len());
    }

    let propagated = engine::propagate(theory, structure, &ctx).expect("propagate");
    check.backbone_match = match (&propagated, expected.is_empty()) {
        (Propagation::Inconsistent, true) => true,
        (Propagation::Refined(r), false) => {
            let first = expected.iter().next().unwrap();
            let atoms: BTreeMap<GroundAtom, bool> = first
                .atoms
                .iter()
                .filter(|(a, v)| expected.iter().all(|m| m.atoms[*a] == **v))
                .map(|(a, v)| (a.clone(), *v))
                .collect();
            let constants: BTreeMap<String, String> = first
                .constants
                .iter()
                .filter(|(c, v)| expected.iter().all(|m| m.constants[*c] == **v))
                .map(|(c, v)| (c.clone(), v.clone()))
                .collect();
            r.atoms == atoms && r.constants == constants
        }
        _ => false,
    };
    if !check.backbone_match {
        check.detail += "backbone differs\n";
    }

    match engine::unsatcore(theory, structure, &ctx) {
        Err(engine::EngineError::Satisfiable) => {
            if expected.is_empty() {
                check.models_match = false;
                check.detail += "unsatcore reported satisfiable on an unsatisfiable instance\n";
            }
        }
        Ok(core) => {
            let insts: Vec<(usize, Vec<String>)> = core
                .items
                .iter()
                .map(|i| (i.sentence, i.substitution.0.iter().map(|(_, v)| v.clone()).collect()))
                .collect();
            let all = oracle.instantiations();
            let known = insts.iter().all(|i| all.contains(i));
            let unsat = !oracle.satisfiable(&insts);
            let minimal = (0..insts.len()).all(|skip| {
                let rest: Vec<_> = insts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, x)| x.clone())
                    .collect();
                oracle.satisfiable(&rest)
            });
            check.core_minimal = Some(known && unsat && minimal && expected.is_empty());
            if check.core_minimal == Some(false) {
                check.detail += &format!("core {insts:?}: unsat={unsat} minimal={minimal}\n");
            }
        }
        Err(e) => panic!("unsatcore failed: {e}"),
    }
    check
}

/// Wall-clock helper for suites with a time budget.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}
