//! Name and type resolution.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use indexmap::IndexMap;

use super::ast::*;
use super::diagnostic::{has_errors, Diagnostic};
use super::printer::print_formula;
use super::span::Span;
use super::typed::*;

/// Commands a procedure may call, with their accepted argument counts.
/// Nothing outside this list is reachable from a procedure.
pub const COMMANDS: &[(&str, usize, usize)] = &[
    ("print", 0, usize::MAX),
    ("ask", 0, 1),
    ("modelexpand", 2, 3),
    ("propagate", 2, 2),
    ("unsatcore", 2, 2),
    ("draw_grid", 2, 2),
    ("draw_cell", 3, 3),
    ("draw_label", 3, 3),
    ("onclick", 0, 0),
    ("exit", 0, 1),
];

pub fn command_arity(name: &str) -> Option<(usize, usize)> {
    COMMANDS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, lo, hi)| (lo, hi))
}

/// Check command names, arities and multi-assignment in a standalone
/// statement, as typed into the shell.
pub fn check_statement(file: &str, stmt: &Stmt) -> Vec<Diagnostic> {
    let mut r = Resolver::default();
    r.stmt(file, stmt);
    r.diags
}

/// Resolve a parsed program. On success the returned program carries any
/// warnings; on failure the list holds errors and warnings.
pub fn resolve(program: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let mut r = Resolver::default();
    r.run(program);
    let Resolver {
        diags,
        vocabularies,
        theories,
        structures,
        procedures,
        ..
    } = r;
    if has_errors(&diags) {
        return Err(diags);
    }
    Ok(TypedProgram {
        program: program.clone(),
        vocabularies,
        theories,
        structures,
        procedures,
        warnings: diags,
    })
}

/// Parse and resolve a set of files as one program.
///
/// Resolution only runs when every file parses, so a syntax error in one file
/// does not cascade into bogus name errors elsewhere.
pub fn check_files<'a>(files: impl IntoIterator<Item = (&'a str, &'a str)>) -> (Option<TypedProgram>, Vec<Diagnostic>) {
    let mut program = Program::default();
    let mut diags = Vec::new();
    for (name, text) in files {
        match super::parser::parse(name, text) {
            Ok(p) => program.blocks.extend(p.blocks),
            Err(d) => diags.extend(d),
        }
    }
    if !diags.is_empty() {
        return (None, diags);
    }
    match resolve(&program) {
        Ok(typed) => {
            let warnings = typed.warnings.clone();
            (Some(typed), warnings)
        }
        Err(d) => (None, d),
    }
}

#[derive(Default)]
struct Resolver {
    diags: Vec<Diagnostic>,
    vocabularies: IndexMap<String, Arc<Vocabulary>>,
    theories: IndexMap<String, TypedTheory>,
    structures: IndexMap<String, TypedStructure>,
    procedures: IndexMap<String, ProcedureBlock>,
    /// vocabulary -> symbols referenced from some theory
    used: HashMap<String, HashSet<String>>,
    has_theory: HashSet<String>,
}

impl Resolver {
    fn error(&mut self, file: &str, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(file, span, msg));
    }

    fn run(&mut self, program: &Program) {
        let mut seen: HashMap<&str, ()> = HashMap::new();
        let mut unique = Vec::new();
        for block in &program.blocks {
            let name = block.name();
            if seen.insert(&name.name, ()).is_some() {
                self.error(&block.file, name.span, format!("duplicate block name {}", name.name));
            } else {
                unique.push(block);
            }
        }
        let mut vocab_blocks = Vec::new();
        for block in &unique {
            if let BlockKind::Vocabulary(v) = &block.kind {
                let vocab = self.vocabulary(&block.file, v);
                self.vocabularies.insert(vocab.name.clone(), Arc::new(vocab));
                vocab_blocks.push((*block, v));
            }
        }
        for block in &unique {
            match &block.kind {
                BlockKind::Theory(t) => self.theory(&block.file, t),
                BlockKind::Structure(s) => self.structure(&block.file, s),
                BlockKind::Procedure(p) => {
                    self.procedure(&block.file, p);
                    self.procedures.insert(p.name.name.clone(), p.clone());
                }
                BlockKind::Vocabulary(_) => {}
            }
        }
        for (block, v) in vocab_blocks {
            self.unused_warnings(&block.file, v);
        }
    }

    fn vocabulary(&mut self, file: &str, block: &VocabularyBlock) -> Vocabulary {
        let mut vocab = Vocabulary {
            name: block.name.name.clone(),
            ..Default::default()
        };
        let mut names = HashSet::new();
        for decl in &block.decls {
            let name = decl.name();
            if !names.insert(name.name.clone()) {
                self.error(file, name.span, format!("duplicate symbol name {}", name.name));
                continue;
            }
            if let Decl::Type(t) = decl {
                vocab.types.insert(t.name.clone(), t.span);
            }
        }
        for decl in &block.decls {
            match decl {
                Decl::Type(_) => {}
                Decl::Predicate { name, args } => {
                    for a in args {
                        if !vocab.types.contains_key(&a.name) {
                            self.error(file, a.span, format!("unknown type {}", a.name));
                        }
                    }
                    vocab.predicates.entry(name.name.clone()).or_insert(PredicateSig {
                        args: args.iter().map(|a| a.name.clone()).collect(),
                        span: name.span,
                    });
                }
                Decl::Constant { name, ty } => {
                    if !vocab.types.contains_key(&ty.name) {
                        self.error(file, ty.span, format!("unknown type {}", ty.name));
                    }
                    vocab.constants.entry(name.name.clone()).or_insert(ConstantSig {
                        ty: ty.name.clone(),
                        span: name.span,
                    });
                }
            }
        }
        vocab
    }

    fn lookup_vocabulary(&mut self, file: &str, name: &Ident) -> Option<Arc<Vocabulary>> {
        let found = self.vocabularies.get(&name.name).cloned();
        if found.is_none() {
            self.error(file, name.span, format!("unknown vocabulary {}", name.name));
        }
        found
    }

    fn theory(&mut self, file: &str, block: &TheoryBlock) {
        let Some(vocab) = self.lookup_vocabulary(file, &block.vocabulary) else {
            return;
        };
        self.has_theory.insert(vocab.name.clone());
        let mut sentences = Vec::new();
        let mut used = HashSet::new();
        for (index, s) in block.sentences.iter().enumerate() {
            let mut sr = SentenceResolver {
                file,
                vocab: &vocab,
                vars: Vec::new(),
                scope: Vec::new(),
                constraints: Vec::new(),
                diags: Vec::new(),
                used: &mut used,
            };
            let formula = sr.formula(&s.formula);
            let vars = sr.infer_types();
            let diags = sr.diags;
            let failed = has_errors(&diags);
            self.diags.extend(diags);
            if !failed {
                sentences.push(TypedSentence {
                    index,
                    span: s.span,
                    text: format!("{}.", print_formula(&s.formula)),
                    vars,
                    formula,
                });
            }
        }
        self.used.entry(vocab.name.clone()).or_default().extend(used);
        self.theories.insert(
            block.name.name.clone(),
            TypedTheory {
                name: block.name.name.clone(),
                vocabulary: vocab,
                file: file.to_string(),
                sentences,
            },
        );
    }

    fn structure(&mut self, file: &str, block: &StructureBlock) {
        let Some(vocab) = self.lookup_vocabulary(file, &block.vocabulary) else {
            return;
        };
        let errors_before = self.diags.iter().filter(|d| d.is_error()).count();
        let mut domains: IndexMap<String, Vec<String>> = IndexMap::new();
        let mut atoms: BTreeMap<GroundAtom, bool> = BTreeMap::new();
        let mut constants = BTreeMap::new();

        // types first: predicate tuples are checked against the domains
        for a in &block.assignments {
            if !vocab.types.contains_key(&a.symbol.name) {
                continue;
            }
            if domains.contains_key(&a.symbol.name) {
                self.error(
                    file,
                    a.symbol.span,
                    format!("type {} is interpreted twice", a.symbol.name),
                );
                continue;
            }
            let elems = match (&a.interp, &a.value) {
                (Interp::Total, AssignedValue::Set(tuples)) => {
                    let mut elems: Vec<String> = Vec::new();
                    for t in tuples {
                        if t.len() != 1 {
                            self.error(
                                file,
                                t[0].span.to(t[t.len() - 1].span),
                                "a type domain lists single elements",
                            );
                        } else if !elems.contains(&t[0].name) {
                            elems.push(t[0].name.clone());
                        }
                    }
                    elems
                }
                _ => {
                    self.error(
                        file,
                        a.span,
                        format!("type {} must be interpreted by a set of elements", a.symbol.name),
                    );
                    continue;
                }
            };
            if elems.is_empty() {
                self.error(file, a.span, format!("type {} has an empty domain", a.symbol.name));
            }
            domains.insert(a.symbol.name.clone(), elems);
        }
        for ty in vocab.types.keys() {
            if !domains.contains_key(ty) {
                self.error(
                    file,
                    block.name.span,
                    format!("type {ty} is not interpreted in structure {}", block.name.name),
                );
            }
        }
        // keep vocabulary order for domains
        let domains: IndexMap<String, Vec<String>> = vocab
            .types
            .keys()
            .filter_map(|t| domains.get(t).map(|d| (t.clone(), d.clone())))
            .collect();

        let mut totals: HashSet<&str> = HashSet::new();
        for a in &block.assignments {
            let name = &a.symbol.name;
            if vocab.types.contains_key(name) {
                continue;
            }
            if let Some(sig) = vocab.predicates.get(name) {
                if a.interp == Interp::Total && !totals.insert(name) {
                    self.error(file, a.symbol.span, format!("predicate {name} is interpreted twice"));
                    continue;
                }
                let listed: Vec<Vec<String>> = match &a.value {
                    AssignedValue::Bool(b) if sig.args.is_empty() && a.interp == Interp::Total => {
                        if *b {
                            vec![vec![]]
                        } else {
                            vec![]
                        }
                    }
                    AssignedValue::Set(tuples) => {
                        let mut ok = Vec::new();
                        for t in tuples {
                            if t.len() != sig.args.len() {
                                self.error(
                                    file,
                                    t[0].span.to(t[t.len() - 1].span),
                                    format!("predicate {name} expects {} arguments, got {}", sig.args.len(), t.len()),
                                );
                                continue;
                            }
                            let mut good = true;
                            for (e, ty) in t.iter().zip(&sig.args) {
                                if domains.get(ty).is_some_and(|d| !d.contains(&e.name)) {
                                    self.error(
                                        file,
                                        e.span,
                                        format!("element {} is not in the domain of {ty}", e.name),
                                    );
                                    good = false;
                                }
                            }
                            if good {
                                ok.push(t.iter().map(|e| e.name.clone()).collect());
                            }
                        }
                        ok
                    }
                    _ => {
                        self.error(
                            file,
                            a.span,
                            format!("predicate {name} must be interpreted by a set of tuples"),
                        );
                        continue;
                    }
                };
                let mut assign = |atom: GroundAtom, value: bool, this: &mut Self| {
                    if let Some(prev) = atoms.insert(atom.clone(), value) {
                        if prev != value {
                            this.error(
                                file,
                                a.span,
                                format!("atom {atom} is both certainly true and certainly false"),
                            );
                        }
                    }
                };
                match a.interp {
                    Interp::Total => {
                        let listed: HashSet<Vec<String>> = listed.into_iter().collect();
                        let doms: Option<Vec<&Vec<String>>> = sig.args.iter().map(|t| domains.get(t)).collect();
                        if let Some(doms) = doms {
                            for tuple in cartesian(&doms) {
                                let v = listed.contains(&tuple);
                                assign(GroundAtom::new(name.clone(), tuple), v, self);
                            }
                        }
                    }
                    Interp::CertainlyTrue | Interp::CertainlyFalse => {
                        let v = a.interp == Interp::CertainlyTrue;
                        for tuple in listed {
                            assign(GroundAtom::new(name.clone(), tuple), v, self);
                        }
                    }
                }
            } else if let Some(sig) = vocab.constants.get(name) {
                match (&a.interp, &a.value) {
                    (Interp::Total, AssignedValue::Element(e)) => {
                        if domains.get(&sig.ty).is_some_and(|d| !d.contains(&e.name)) {
                            self.error(
                                file,
                                e.span,
                                format!("element {} is not in the domain of {}", e.name, sig.ty),
                            );
                        } else if constants.insert(name.clone(), e.name.clone()).is_some() {
                            self.error(file, a.symbol.span, format!("constant {name} is interpreted twice"));
                        }
                    }
                    _ => self.error(
                        file,
                        a.span,
                        format!("constant {name} must be interpreted by a single element"),
                    ),
                }
            } else {
                self.error(
                    file,
                    a.symbol.span,
                    format!("unknown symbol {name} in structure {}", block.name.name),
                );
            }
        }

        let errors_after = self.diags.iter().filter(|d| d.is_error()).count();
        if errors_after == errors_before {
            self.structures.insert(
                block.name.name.clone(),
                TypedStructure {
                    name: block.name.name.clone(),
                    vocabulary: vocab,
                    file: file.to_string(),
                    domains,
                    atoms,
                    constants,
                },
            );
        }
    }

    fn procedure(&mut self, file: &str, block: &ProcedureBlock) {
        for s in &block.body {
            self.stmt(file, s);
        }
    }

    fn stmt(&mut self, file: &str, s: &Stmt) {
        match &s.kind {
            StmtKind::Assign { targets, value } => {
                if targets.len() > 1 {
                    let is_onclick = matches!(&value.kind, ExprKind::Call { name, .. } if name.name == "onclick");
                    if !is_onclick || targets.len() != 2 {
                        self.error(file, s.span, "only `x, y := onclick()` assigns more than one variable");
                    }
                }
                self.expr(file, value);
            }
            StmtKind::If { cond, then, otherwise } => {
                self.expr(file, cond);
                then.iter().for_each(|s| self.stmt(file, s));
                if let Some(o) = otherwise {
                    o.iter().for_each(|s| self.stmt(file, s));
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(file, cond);
                body.iter().for_each(|s| self.stmt(file, s));
            }
            StmtKind::Expr(e) => self.expr(file, e),
        }
    }

    fn expr(&mut self, file: &str, e: &Expr) {
        match &e.kind {
            ExprKind::Call { name, args } => {
                match command_arity(&name.name) {
                    None => self.error(file, name.span, format!("unknown command {}", name.name)),
                    Some((lo, hi)) if args.len() < lo || args.len() > hi => {
                        let expected = if lo == hi {
                            lo.to_string()
                        } else {
                            format!("{lo} to {hi}")
                        };
                        self.error(
                            file,
                            e.span,
                            format!("{} expects {expected} arguments, got {}", name.name, args.len()),
                        );
                    }
                    Some(_) => {}
                }
                args.iter().for_each(|a| self.expr(file, a));
            }
            ExprKind::Unary(_, inner) => self.expr(file, inner),
            ExprKind::Binary(_, a, b) => {
                self.expr(file, a);
                self.expr(file, b);
            }
            ExprKind::Int(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Var(_) => {}
        }
    }

    /// Unused-symbol warnings, only for vocabularies that some theory uses;
    /// a lone vocabulary is usually work in progress.
    fn unused_warnings(&mut self, file: &str, block: &VocabularyBlock) {
        if !self.has_theory.contains(&block.name.name) {
            return;
        }
        let used = self.used.get(&block.name.name).cloned().unwrap_or_default();
        let mut used_types: HashSet<&str> = HashSet::new();
        for d in &block.decls {
            match d {
                Decl::Predicate { args, .. } => used_types.extend(args.iter().map(|a| a.name.as_str())),
                Decl::Constant { ty, .. } => {
                    used_types.insert(&ty.name);
                }
                Decl::Type(_) => {}
            }
        }
        for d in &block.decls {
            let name = d.name();
            let (unused, what) = match d {
                Decl::Type(_) => (
                    !used_types.contains(name.name.as_str()) && !used.contains(&name.name),
                    "type",
                ),
                Decl::Predicate { .. } => (!used.contains(&name.name), "predicate"),
                Decl::Constant { .. } => (!used.contains(&name.name), "constant"),
            };
            if unused {
                self.diags.push(Diagnostic::warning(
                    file,
                    name.span,
                    format!("{what} {} is declared but never used", name.name),
                ));
            }
        }
    }
}

pub(crate) fn cartesian(domains: &[&Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for prefix in &out {
            for e in d.iter() {
                let mut t = prefix.clone();
                t.push(e.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

struct VarState {
    name: String,
    ty: Option<String>,
    span: Span,
}

enum Constraint {
    Is(VarId, String, Span),
    Same(VarId, VarId, Span),
}

struct SentenceResolver<'a> {
    file: &'a str,
    vocab: &'a Vocabulary,
    vars: Vec<VarState>,
    scope: Vec<(String, VarId)>,
    constraints: Vec<Constraint>,
    diags: Vec<Diagnostic>,
    used: &'a mut HashSet<String>,
}

enum TermType {
    Var(VarId),
    Known(String),
}

impl SentenceResolver<'_> {
    fn error(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(self.file, span, msg));
    }

    fn lookup_var(&self, name: &str) -> Option<VarId> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn formula(&mut self, f: &Formula) -> TFormula {
        match &f.kind {
            FormulaKind::Bool(b) => TFormula::Bool(*b),
            FormulaKind::Atom { pred, args } => self.atom(pred, args),
            FormulaKind::Eq(a, b) => {
                let (ta, ka) = self.term(a);
                let (tb, kb) = self.term(b);
                match (ka, kb) {
                    (Some(TermType::Known(x)), Some(TermType::Known(y))) if x != y => {
                        self.error(f.span, format!("type mismatch in equality: {x} vs {y}"));
                    }
                    (Some(TermType::Var(v)), Some(TermType::Known(t)))
                    | (Some(TermType::Known(t)), Some(TermType::Var(v))) => {
                        self.constraints.push(Constraint::Is(v, t, f.span));
                    }
                    (Some(TermType::Var(v)), Some(TermType::Var(w))) => {
                        self.constraints.push(Constraint::Same(v, w, f.span));
                    }
                    _ => {}
                }
                TFormula::Eq(ta, tb)
            }
            FormulaKind::Not(inner) => TFormula::Not(Box::new(self.formula(inner))),
            FormulaKind::And(parts) => TFormula::And(parts.iter().map(|p| self.formula(p)).collect()),
            FormulaKind::Or(parts) => TFormula::Or(parts.iter().map(|p| self.formula(p)).collect()),
            FormulaKind::Implies(a, b) => TFormula::Implies(Box::new(self.formula(a)), Box::new(self.formula(b))),
            FormulaKind::Equiv(a, b) => TFormula::Equiv(Box::new(self.formula(a)), Box::new(self.formula(b))),
            FormulaKind::Quant { q, vars, body } => {
                let mut ids = Vec::new();
                let mut local: HashSet<&str> = HashSet::new();
                for v in vars {
                    if self.lookup_var(&v.name.name).is_some() || !local.insert(&v.name.name) {
                        self.diags.push(Diagnostic::warning(
                            self.file,
                            v.name.span,
                            format!("variable {} shadows an outer variable", v.name.name),
                        ));
                    } else if self.vocab.constants.contains_key(&v.name.name) {
                        self.diags.push(Diagnostic::warning(
                            self.file,
                            v.name.span,
                            format!("variable {} shadows constant {}", v.name.name, v.name.name),
                        ));
                    }
                    let ty = match &v.ty {
                        Some(t) if self.vocab.types.contains_key(&t.name) => {
                            self.used.insert(t.name.clone());
                            Some(t.name.clone())
                        }
                        Some(t) => {
                            self.error(t.span, format!("unknown type {}", t.name));
                            None
                        }
                        None => None,
                    };
                    let id = VarId(self.vars.len());
                    self.vars.push(VarState {
                        name: v.name.name.clone(),
                        ty,
                        span: v.name.span,
                    });
                    ids.push(id);
                }
                let depth = self.scope.len();
                for (v, id) in vars.iter().zip(&ids) {
                    self.scope.push((v.name.name.clone(), *id));
                }
                let body = self.formula(body);
                self.scope.truncate(depth);
                TFormula::Quant {
                    q: *q,
                    vars: ids,
                    body: Box::new(body),
                }
            }
        }
    }

    fn atom(&mut self, pred: &Ident, args: &[Ident]) -> TFormula {
        let name = &pred.name;
        let Some(sig) = self.vocab.predicates.get(name) else {
            let msg = if self.lookup_var(name).is_some() {
                format!("{name} is a variable, not a predicate")
            } else if self.vocab.constants.contains_key(name) {
                format!("{name} is a constant, not a predicate")
            } else if self.vocab.types.contains_key(name) {
                format!("{name} is a type, not a predicate")
            } else {
                format!("unknown predicate {name}")
            };
            self.error(pred.span, msg);
            return TFormula::Bool(false);
        };
        self.used.insert(name.clone());
        if sig.args.len() != args.len() {
            let span = args.iter().fold(pred.span, |s, a| s.to(a.span));
            self.error(
                span,
                format!(
                    "predicate {name} expects {} arguments, got {}",
                    sig.args.len(),
                    args.len()
                ),
            );
            return TFormula::Bool(false);
        }
        let arg_types = sig.args.clone();
        let mut terms = Vec::new();
        for (i, (a, expected)) in args.iter().zip(&arg_types).enumerate() {
            let (t, ty) = self.term(a);
            match ty {
                Some(TermType::Var(v)) => self.constraints.push(Constraint::Is(v, expected.clone(), a.span)),
                Some(TermType::Known(actual)) if &actual != expected => self.error(
                    a.span,
                    format!(
                        "type mismatch: {} has type {actual}, but {name} expects {expected} at argument {}",
                        a.name,
                        i + 1
                    ),
                ),
                _ => {}
            }
            terms.push(t);
        }
        TFormula::Atom {
            pred: name.clone(),
            args: terms,
        }
    }

    fn term(&mut self, ident: &Ident) -> (Term, Option<TermType>) {
        if let Some(v) = self.lookup_var(&ident.name) {
            return (Term::Var(v), Some(TermType::Var(v)));
        }
        if let Some(c) = self.vocab.constants.get(&ident.name) {
            self.used.insert(ident.name.clone());
            return (Term::Const(ident.name.clone()), Some(TermType::Known(c.ty.clone())));
        }
        let msg = if self.vocab.predicates.contains_key(&ident.name) {
            format!("{} is a predicate, not a term", ident.name)
        } else {
            format!("unbound variable or unknown constant {}", ident.name)
        };
        self.error(ident.span, msg);
        (Term::Const(ident.name.clone()), None)
    }

    fn infer_types(&mut self) -> Vec<VarInfo> {
        let mut conflicted = vec![false; self.vars.len()];
        let mut changed = true;
        let mut reported = Vec::new();
        while changed {
            changed = false;
            for c in &self.constraints {
                match c {
                    Constraint::Is(v, t, span) => match &self.vars[v.0].ty {
                        None => {
                            self.vars[v.0].ty = Some(t.clone());
                            changed = true;
                        }
                        Some(have) if have != t && !conflicted[v.0] => {
                            conflicted[v.0] = true;
                            reported.push((
                                *span,
                                format!("variable {} is used as both {have} and {t}", self.vars[v.0].name),
                            ));
                        }
                        _ => {}
                    },
                    Constraint::Same(a, b, span) => match (self.vars[a.0].ty.clone(), self.vars[b.0].ty.clone()) {
                        (Some(x), None) => {
                            self.vars[b.0].ty = Some(x);
                            changed = true;
                        }
                        (None, Some(y)) => {
                            self.vars[a.0].ty = Some(y);
                            changed = true;
                        }
                        (Some(x), Some(y)) if x != y && !conflicted[a.0] => {
                            conflicted[a.0] = true;
                            reported.push((*span, format!("type mismatch in equality: {x} vs {y}")));
                        }
                        _ => {}
                    },
                }
            }
        }
        for (span, msg) in reported {
            self.error(span, msg);
        }
        let mut out = Vec::new();
        for i in 0..self.vars.len() {
            let v = &self.vars[i];
            match &v.ty {
                Some(t) => {
                    self.used.insert(t.clone());
                    out.push(VarInfo {
                        name: v.name.clone(),
                        ty: t.clone(),
                    });
                }
                None => {
                    let (span, name) = (v.span, v.name.clone());
                    self.error(
                        span,
                        format!("cannot infer the type of variable {name}; annotate it as {name}[Type]"),
                    );
                    out.push(VarInfo {
                        name,
                        ty: String::new(),
                    });
                }
            }
        }
        out
    }
}
