//! Interpreter for procedures and shell lines. Only the commands in
//! [`COMMANDS`](crate::language::resolve::COMMANDS) are reachable; none of
//! them touch the filesystem or the network.

use std::collections::HashMap;
use std::fmt;

use super::events::{RunMode, SessionEvent, SourceFile, VizCommand};
use super::run::{RunShared, Stop, Wait, WaitResult};
use crate::engine::{self, check_vocabulary, Context, EngineError, PartialStructure, Propagation, UnsatCore};
use crate::language::ast::{BinOp, Expr, ExprKind, Stmt, StmtKind, UnOp};
use crate::language::resolve::check_statement;
use crate::language::{check_files, parse_commands, TypedProgram, TypedStructure, TypedTheory};

/// Largest grid a procedure may draw, per side.
pub const MAX_GRID_SIDE: i64 = 256;

const SHELL_PROMPT: &str = "> ";
const SHELL_FILE: &str = "<shell>";

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Value {
    Unit,
    Int(i64),
    Bool(bool),
    Str(String),
    /// A theory, structure or procedure referred to by name.
    Block(String),
    Models(Vec<PartialStructure>),
    Structure(PartialStructure),
    Inconsistent,
    Core(UnsatCore),
    Pair(i64, i64),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Unit => "nothing",
            Value::Int(_) => "an integer",
            Value::Bool(_) => "a boolean",
            Value::Str(_) => "a string",
            Value::Block(_) => "a block",
            Value::Models(_) => "a model list",
            Value::Structure(_) => "a structure",
            Value::Inconsistent => "an inconsistency result",
            Value::Core(_) => "an unsat core",
            Value::Pair(..) => "a pair",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => Ok(()),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(s),
            Value::Block(n) => f.write_str(n),
            Value::Models(ms) if ms.is_empty() => f.write_str("no models"),
            Value::Models(ms) => {
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str("\n")?;
                    }
                    write!(f, "model {}:\n{}", i + 1, m.render())?;
                }
                Ok(())
            }
            Value::Structure(s) => f.write_str(&s.render()),
            Value::Inconsistent => f.write_str("inconsistent: the theory has no model in this structure"),
            Value::Core(c) => f.write_str(&c.render()),
            Value::Pair(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

enum Flow {
    Stop(Stop),
    Exit(i32),
    Error(String),
}

impl From<Stop> for Flow {
    fn from(s: Stop) -> Self {
        Flow::Stop(s)
    }
}

type Eval<T> = Result<T, Flow>;

fn error<T>(msg: impl Into<String>) -> Eval<T> {
    Err(Flow::Error(msg.into()))
}

struct Interp<'a> {
    shared: &'a RunShared,
    program: &'a TypedProgram,
    vars: HashMap<String, Value>,
}

/// Entry point of the worker thread. Always finishes the run.
pub(crate) fn run(shared: &RunShared, files: &[SourceFile], mode: RunMode, entry: Option<&str>) {
    let (program, diags) = check_files(files.iter().map(|f| (f.name.as_str(), f.content.as_str())));
    let Some(program) = program else {
        let mut text = String::new();
        for d in diags.iter().filter(|d| d.is_error()) {
            text.push_str(&format!("{d}\n"));
        }
        match shared.emit(SessionEvent::Stderr { data: text }) {
            Ok(()) => shared.finish(1),
            Err(stop) => end(shared, stop),
        }
        return;
    };
    let mut interp = Interp {
        shared,
        program: &program,
        vars: HashMap::new(),
    };
    match mode {
        RunMode::Main => interp.main(entry),
        RunMode::Shell => interp.shell(),
    }
}

fn end(shared: &RunShared, stop: Stop) {
    if let Stop::Limit(kind) = stop {
        shared.finish_with_limit(kind);
    }
}

fn pick_entry<'p>(program: &'p TypedProgram, entry: Option<&str>) -> Result<&'p str, String> {
    let procs = &program.procedures;
    if let Some(name) = entry {
        return procs
            .get_key_value(name)
            .map(|(k, _)| k.as_str())
            .ok_or_else(|| format!("no procedure named {name}"));
    }
    if let Some((k, _)) = procs.get_key_value("main") {
        return Ok(k);
    }
    match procs.len() {
        1 => Ok(procs.keys().next().map(String::as_str).unwrap_or_default()),
        0 => Err("the program has no procedure to run".into()),
        _ => Err("several procedures and none is called main; choose an entry procedure".into()),
    }
}

impl<'a> Interp<'a> {
    fn main(&mut self, entry: Option<&str>) {
        let name = match pick_entry(self.program, entry) {
            Ok(n) => n,
            Err(msg) => return self.fail(format!("error: {msg}\n")),
        };
        let proc = &self.program.procedures[name];
        let file = self
            .program
            .program
            .blocks
            .iter()
            .find(|b| b.kind_name() == "procedure" && b.name().name == name)
            .map_or("", |b| b.file.as_str());
        let mut at = None;
        let result = self.block(&proc.body, &mut at);
        match result {
            Ok(()) => self.shared.finish(0),
            Err(Flow::Exit(code)) => self.shared.finish(code),
            Err(Flow::Stop(stop)) => end(self.shared, stop),
            Err(Flow::Error(msg)) => {
                let (line, col) = at.map_or((0, 0), |s: &Stmt| (s.span.start.line, s.span.start.col));
                self.fail(format!("{file}:{line}:{col}: runtime error: {msg}\n"));
            }
        }
    }

    fn fail(&self, text: String) {
        match self.shared.emit(SessionEvent::Stderr { data: text }) {
            Ok(()) => self.shared.finish(1),
            Err(stop) => end(self.shared, stop),
        }
    }

    fn shell(&mut self) {
        let stop = loop {
            if let Err(stop) = self.shared.emit(SessionEvent::Ask {
                prompt: SHELL_PROMPT.into(),
            }) {
                break stop;
            }
            let line = match self.shared.wait_for(Wait::Line) {
                Ok(WaitResult::Line(l)) => l,
                Ok(WaitResult::Click(..)) => continue,
                Err(stop) => break stop,
            };
            match self.shell_line(line.trim()) {
                Ok(()) => {}
                Err(Flow::Exit(code)) => return self.shared.finish(code),
                Err(Flow::Stop(stop)) => break stop,
                Err(Flow::Error(msg)) => {
                    if let Err(stop) = self.shared.emit(SessionEvent::Stderr {
                        data: format!("error: {msg}\n"),
                    }) {
                        break stop;
                    }
                }
            }
        };
        end(self.shared, stop);
    }

    fn shell_line(&mut self, line: &str) -> Eval<()> {
        if line.is_empty() {
            return Ok(());
        }
        if line == "exit" {
            return Err(Flow::Exit(0));
        }
        let stmts = match parse_commands(line) {
            Ok(s) => s,
            Err(d) => return error(format!("parse error in command: {}", d.message)),
        };
        for stmt in &stmts {
            if let Some(d) = check_statement(SHELL_FILE, stmt).into_iter().find(|d| d.is_error()) {
                return error(d.message);
            }
        }
        for stmt in &stmts {
            if let StmtKind::Expr(e) = &stmt.kind {
                let v = self.expr(e)?;
                if v != Value::Unit {
                    self.shared.emit(SessionEvent::Stdout { data: format!("{v}\n") })?;
                }
            } else {
                let mut at = None;
                self.stmt(stmt, &mut at)?;
            }
        }
        Ok(())
    }

    fn block<'s>(&mut self, stmts: &'s [Stmt], at: &mut Option<&'s Stmt>) -> Eval<()> {
        for s in stmts {
            self.stmt(s, at)?;
        }
        Ok(())
    }

    /// `at` tracks the innermost statement for error locations.
    fn stmt<'s>(&mut self, s: &'s Stmt, at: &mut Option<&'s Stmt>) -> Eval<()> {
        self.shared.check()?;
        *at = Some(s);
        match &s.kind {
            StmtKind::Assign { targets, value } => {
                let v = self.expr(value)?;
                match (targets.as_slice(), v) {
                    ([x, y], Value::Pair(a, b)) => {
                        self.vars.insert(x.name.clone(), Value::Int(a));
                        self.vars.insert(y.name.clone(), Value::Int(b));
                    }
                    ([t], v) => {
                        self.vars.insert(t.name.clone(), v);
                    }
                    (_, v) => return error(format!("cannot assign {} to {} variables", v.kind(), targets.len())),
                }
            }
            StmtKind::If { cond, then, otherwise } => {
                if self.condition(cond)? {
                    self.block(then, at)?;
                } else if let Some(o) = otherwise {
                    self.block(o, at)?;
                }
            }
            StmtKind::While { cond, body } => {
                while self.condition(cond)? {
                    self.shared.check()?;
                    self.block(body, at)?;
                    *at = Some(s);
                }
            }
            StmtKind::Expr(e) => {
                self.expr(e)?;
            }
        }
        Ok(())
    }

    fn condition(&mut self, e: &Expr) -> Eval<bool> {
        let v = self.expr(e)?;
        truthy(&v)
    }

    fn expr(&mut self, e: &Expr) -> Eval<Value> {
        Ok(match &e.kind {
            ExprKind::Int(i) => Value::Int(*i),
            ExprKind::Str(s) => Value::Str(s.clone()),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Var(id) => match self.vars.get(&id.name) {
                Some(v) => v.clone(),
                None if self.is_block(&id.name) => Value::Block(id.name.clone()),
                None => return error(format!("unknown variable {}", id.name)),
            },
            ExprKind::Unary(UnOp::Neg, inner) => match self.expr(inner)? {
                Value::Int(i) => Value::Int(i.checked_neg().ok_or_else(overflow)?),
                v => return error(format!("cannot negate {}", v.kind())),
            },
            ExprKind::Unary(UnOp::Not, inner) => {
                let v = self.expr(inner)?;
                Value::Bool(!truthy(&v)?)
            }
            ExprKind::Binary(BinOp::And, a, b) => {
                let a = self.condition(a)?;
                Value::Bool(a && self.condition(b)?)
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                let a = self.condition(a)?;
                Value::Bool(a || self.condition(b)?)
            }
            ExprKind::Binary(op, a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                binary(*op, a, b)?
            }
            ExprKind::Call { name, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.expr(a)?);
                }
                self.call(&name.name, values)?
            }
        })
    }

    fn is_block(&self, name: &str) -> bool {
        self.program.theories.contains_key(name)
            || self.program.structures.contains_key(name)
            || self.program.procedures.contains_key(name)
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> Eval<Value> {
        match name {
            "print" => {
                let text: Vec<String> = args.iter().map(Value::to_string).collect();
                let mut data = text.join(" ");
                data.push('\n');
                self.shared.emit(SessionEvent::Stdout { data })?;
                Ok(Value::Unit)
            }
            "ask" => {
                let prompt = args.first().map(Value::to_string).unwrap_or_default();
                self.shared.emit(SessionEvent::Ask { prompt })?;
                match self.shared.wait_for(Wait::Line)? {
                    WaitResult::Line(l) => Ok(Value::Str(l)),
                    WaitResult::Click(..) => error("expected a line of input"),
                }
            }
            "modelexpand" => {
                let cap = self.shared.limits.max_models;
                let n = match args.get(2) {
                    None => cap,
                    Some(Value::Int(n)) if *n > 0 => (*n as u64).min(cap),
                    Some(v) => return error(format!("model count must be a positive integer, got {}", v.kind())),
                };
                let (t, s) = self.inference_args(&args)?;
                let n = usize::try_from(n).unwrap_or(usize::MAX);
                let models = self.engine(|ctx| engine::modelexpand(t, &s, n, ctx))?;
                Ok(Value::Models(models))
            }
            "propagate" => {
                let (t, s) = self.inference_args(&args)?;
                Ok(match self.engine(|ctx| engine::propagate(t, &s, ctx))? {
                    Propagation::Refined(p) => Value::Structure(p),
                    Propagation::Inconsistent => Value::Inconsistent,
                })
            }
            "unsatcore" => {
                let (t, s) = self.inference_args(&args)?;
                Ok(Value::Core(self.engine(|ctx| engine::unsatcore(t, &s, ctx))?))
            }
            "draw_grid" => {
                let w = int_arg(&args, 0, "width")?;
                let h = int_arg(&args, 1, "height")?;
                for (what, v) in [("width", w), ("height", h)] {
                    if !(1..=MAX_GRID_SIDE).contains(&v) {
                        return error(format!("grid {what} must be between 1 and {MAX_GRID_SIDE}, got {v}"));
                    }
                }
                self.shared.viz(VizCommand::Grid {
                    width: w as u32,
                    height: h as u32,
                })?;
                Ok(Value::Unit)
            }
            "draw_cell" | "draw_label" => {
                let (x, y) = self.cell(&args)?;
                let text = args[2].to_string();
                let cmd = if name == "draw_cell" {
                    if !valid_color(&text) {
                        return error(format!("invalid color {text:?}"));
                    }
                    VizCommand::Cell { x, y, color: text }
                } else {
                    VizCommand::Label { x, y, text }
                };
                self.shared.viz(cmd)?;
                Ok(Value::Unit)
            }
            "onclick" => {
                if self.shared.grid().is_none() {
                    return error("onclick needs a grid; call draw_grid first");
                }
                match self.shared.wait_for(Wait::Click)? {
                    WaitResult::Click(x, y) => Ok(Value::Pair(x.into(), y.into())),
                    WaitResult::Line(_) => error("expected a click"),
                }
            }
            "exit" => match args.first() {
                None => Err(Flow::Exit(0)),
                Some(Value::Int(c)) => Err(Flow::Exit(i32::try_from(*c).unwrap_or(1))),
                Some(v) => error(format!("exit code must be an integer, got {}", v.kind())),
            },
            other => error(format!("unknown command {other}")),
        }
    }

    fn cell(&self, args: &[Value]) -> Eval<(u32, u32)> {
        let x = int_arg(args, 0, "x")?;
        let y = int_arg(args, 1, "y")?;
        let Some((w, h)) = self.shared.grid() else {
            return error("no grid is drawn; call draw_grid first");
        };
        if x < 0 || y < 0 || x >= i64::from(w) || y >= i64::from(h) {
            return error(format!("cell ({x}, {y}) is outside the {w}x{h} grid"));
        }
        Ok((x as u32, y as u32))
    }

    fn inference_args(&self, args: &[Value]) -> Eval<(&'a TypedTheory, TypedStructure)> {
        let theory = match &args[0] {
            Value::Block(n) => match self.program.theories.get(n) {
                Some(t) => t,
                None => return error(format!("{n} is not a theory")),
            },
            v => return error(format!("expected a theory, got {}", v.kind())),
        };
        let structure = match &args[1] {
            Value::Block(n) => match self.program.structures.get(n) {
                Some(s) => s.clone(),
                None => return error(format!("{n} is not a structure")),
            },
            Value::Structure(p) => TypedStructure {
                name: p.name.clone(),
                vocabulary: p.vocabulary.clone(),
                file: String::new(),
                domains: p.domains.clone(),
                atoms: p.atoms.clone(),
                constants: p.constants.clone(),
            },
            v => return error(format!("expected a structure, got {}", v.kind())),
        };
        check_vocabulary(theory, &structure).map_err(|e| Flow::Error(e.to_string()))?;
        Ok((theory, structure))
    }

    fn engine<T>(&self, f: impl FnOnce(&Context<'_>) -> Result<T, EngineError>) -> Eval<T> {
        let ctx = Context::new(self.shared.limits.engine(), Some(self.shared));
        match f(&ctx) {
            Ok(v) => Ok(v),
            Err(EngineError::Limit(kind)) => {
                self.shared.cancel(kind);
                self.shared.check()?;
                Err(Flow::Stop(Stop::Limit(kind)))
            }
            Err(e) => error(e.to_string()),
        }
    }
}

fn overflow() -> Flow {
    Flow::Error("integer overflow".into())
}

fn truthy(v: &Value) -> Eval<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Int(i) => Ok(*i != 0),
        v => error(format!("condition must be a boolean or an integer, got {}", v.kind())),
    }
}

fn int_arg(args: &[Value], i: usize, what: &str) -> Eval<i64> {
    match &args[i] {
        Value::Int(v) => Ok(*v),
        v => error(format!("{what} must be an integer, got {}", v.kind())),
    }
}

/// Colors are handed to the browser, so only plain CSS color syntax passes.
fn valid_color(c: &str) -> bool {
    !c.is_empty() && c.len() <= 32 && c.chars().all(|ch| ch.is_ascii_alphanumeric() || "#(),.% ".contains(ch))
}

fn binary(op: BinOp, a: Value, b: Value) -> Eval<Value> {
    use Value::*;
    Ok(match (op, a, b) {
        (BinOp::Add, Int(x), Int(y)) => Int(x.checked_add(y).ok_or_else(overflow)?),
        (BinOp::Add, Str(x), y) => Str(format!("{x}{y}")),
        (BinOp::Add, x, Str(y)) => Str(format!("{x}{y}")),
        (BinOp::Sub, Int(x), Int(y)) => Int(x.checked_sub(y).ok_or_else(overflow)?),
        (BinOp::Mul, Int(x), Int(y)) => Int(x.checked_mul(y).ok_or_else(overflow)?),
        (BinOp::Div | BinOp::Rem, Int(_), Int(0)) => return error("division by zero"),
        (BinOp::Div, Int(x), Int(y)) => Int(x.checked_div(y).ok_or_else(overflow)?),
        (BinOp::Rem, Int(x), Int(y)) => Int(x.checked_rem(y).ok_or_else(overflow)?),
        (BinOp::Eq, x, y) => Bool(equal(&x, &y)?),
        (BinOp::Ne, x, y) => Bool(!equal(&x, &y)?),
        (op @ (BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge), x, y) => {
            let ord = match (&x, &y) {
                (Int(a), Int(b)) => a.cmp(b),
                (Str(a), Str(b)) => a.cmp(b),
                _ => return error(format!("cannot compare {} with {}", x.kind(), y.kind())),
            };
            Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        (op, x, y) => {
            return error(format!(
                "operator {} does not apply to {} and {}",
                op.symbol(),
                x.kind(),
                y.kind()
            ))
        }
    })
}

fn equal(a: &Value, b: &Value) -> Eval<bool> {
    match (a, b) {
        (Value::Int(_), Value::Int(_))
        | (Value::Bool(_), Value::Bool(_))
        | (Value::Str(_), Value::Str(_))
        | (Value::Block(_), Value::Block(_))
        | (Value::Pair(..), Value::Pair(..)) => Ok(a == b),
        _ => error(format!("cannot compare {} with {}", a.kind(), b.kind())),
    }
}
