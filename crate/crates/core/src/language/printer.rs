//! Canonical ASCII rendering of a [`Program`].
//!
//! Output always reparses to the same tree (modulo spans). Compound operands
//! of binary connectives are parenthesized unconditionally.

use std::fmt::Write;

use super::ast::*;
use super::lexer::escape;

const INDENT: &str = "    ";

pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for (i, block) in program.blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_block(&mut out, block);
    }
    out
}

pub fn print_block(out: &mut String, block: &Block) {
    match &block.kind {
        BlockKind::Vocabulary(v) => {
            let _ = writeln!(out, "vocabulary {} {{", v.name.name);
            for d in &v.decls {
                out.push_str(INDENT);
                match d {
                    Decl::Type(n) => {
                        let _ = write!(out, "type {}", n.name);
                    }
                    Decl::Predicate { name, args } => {
                        out.push_str(&name.name);
                        if !args.is_empty() {
                            let _ = write!(out, "({})", join_idents(args, ", "));
                        }
                    }
                    Decl::Constant { name, ty } => {
                        let _ = write!(out, "{} : {}", name.name, ty.name);
                    }
                }
                out.push('\n');
            }
            out.push_str("}\n");
        }
        BlockKind::Theory(t) => {
            let _ = writeln!(out, "theory {} : {} {{", t.name.name, t.vocabulary.name);
            for s in &t.sentences {
                let _ = writeln!(out, "{INDENT}{}.", print_formula(&s.formula));
            }
            out.push_str("}\n");
        }
        BlockKind::Structure(s) => {
            let _ = writeln!(out, "structure {} : {} {{", s.name.name, s.vocabulary.name);
            for a in &s.assignments {
                let _ = writeln!(out, "{INDENT}{}", print_assignment(a));
            }
            out.push_str("}\n");
        }
        BlockKind::Procedure(p) => {
            let _ = writeln!(out, "procedure {}() {{", p.name.name);
            for s in &p.body {
                print_stmt(out, s, 1);
            }
            out.push_str("}\n");
        }
    }
}

fn join_idents(idents: &[Ident], sep: &str) -> String {
    idents.iter().map(|i| i.name.as_str()).collect::<Vec<_>>().join(sep)
}

fn print_assignment(a: &Assignment) -> String {
    let suffix = match a.interp {
        Interp::Total => "",
        Interp::CertainlyTrue => "<ct>",
        Interp::CertainlyFalse => "<cf>",
    };
    let value = match &a.value {
        AssignedValue::Bool(b) => b.to_string(),
        AssignedValue::Element(e) => e.name.clone(),
        AssignedValue::Set(tuples) if tuples.is_empty() => "{}".to_string(),
        AssignedValue::Set(tuples) => {
            let items: Vec<String> = tuples.iter().map(|t| join_idents(t, ",")).collect();
            format!("{{ {} }}", items.join("; "))
        }
    };
    format!("{}{suffix} = {value}", a.symbol.name)
}

pub fn print_formula(f: &Formula) -> String {
    match &f.kind {
        FormulaKind::Bool(b) => b.to_string(),
        FormulaKind::Atom { pred, args } if args.is_empty() => pred.name.clone(),
        FormulaKind::Atom { pred, args } => format!("{}({})", pred.name, join_idents(args, ", ")),
        FormulaKind::Eq(a, b) => format!("{} = {}", a.name, b.name),
        FormulaKind::Not(inner) => format!("~{}", operand(inner)),
        FormulaKind::And(parts) => join_operands(parts, " & "),
        FormulaKind::Or(parts) => join_operands(parts, " | "),
        FormulaKind::Implies(a, b) => format!("{} => {}", operand(a), operand(b)),
        FormulaKind::Equiv(a, b) => format!("{} <=> {}", operand(a), operand(b)),
        FormulaKind::Quant { q, vars, body } => {
            let sym = match q {
                Quantifier::Forall => "!",
                Quantifier::Exists => "?",
            };
            let vars: Vec<String> = vars
                .iter()
                .map(|v| match &v.ty {
                    Some(t) => format!("{}[{}]", v.name.name, t.name),
                    None => v.name.name.clone(),
                })
                .collect();
            format!("{sym}{}: {}", vars.join(" "), print_formula(body))
        }
    }
}

fn is_simple(f: &Formula) -> bool {
    matches!(
        f.kind,
        FormulaKind::Bool(_) | FormulaKind::Atom { .. } | FormulaKind::Not(_)
    )
}

fn operand(f: &Formula) -> String {
    if is_simple(f) {
        print_formula(f)
    } else {
        format!("({})", print_formula(f))
    }
}

fn join_operands(parts: &[Formula], sep: &str) -> String {
    parts.iter().map(operand).collect::<Vec<_>>().join(sep)
}

fn print_stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match &s.kind {
        StmtKind::Assign { targets, value } => {
            let _ = writeln!(out, "{pad}{} := {}", join_idents(targets, ", "), print_expr(value));
        }
        StmtKind::Expr(e) => {
            let _ = writeln!(out, "{pad}{}", print_expr(e));
        }
        StmtKind::While { cond, body } => {
            let _ = writeln!(out, "{pad}while {} {{", print_expr(cond));
            for s in body {
                print_stmt(out, s, depth + 1);
            }
            let _ = writeln!(out, "{pad}}}");
        }
        StmtKind::If { cond, then, otherwise } => {
            let _ = writeln!(out, "{pad}if {} {{", print_expr(cond));
            for s in then {
                print_stmt(out, s, depth + 1);
            }
            match otherwise {
                None => {
                    let _ = writeln!(out, "{pad}}}");
                }
                Some(other) => {
                    let _ = writeln!(out, "{pad}}} else {{");
                    for s in other {
                        print_stmt(out, s, depth + 1);
                    }
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
    }
}

pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(n) => n.to_string(),
        ExprKind::Str(s) => escape(s),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Var(v) => v.name.clone(),
        ExprKind::Call { name, args } => {
            let args: Vec<String> = args.iter().map(print_expr).collect();
            format!("{}({})", name.name, args.join(", "))
        }
        ExprKind::Unary(op, inner) => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "~",
            };
            format!("{sym}{}", expr_operand(inner))
        }
        ExprKind::Binary(op, a, b) => {
            format!("{} {} {}", expr_operand(a), op.symbol(), expr_operand(b))
        }
    }
}

fn expr_operand(e: &Expr) -> String {
    match &e.kind {
        // `~` binds looser than arithmetic and comparison
        ExprKind::Binary(..) | ExprKind::Unary(UnOp::Not, _) => format!("({})", print_expr(e)),
        // a negative literal prints as `-5`, which would reparse as a unary
        ExprKind::Int(n) if *n < 0 => format!("({})", n),
        _ => print_expr(e),
    }
}
