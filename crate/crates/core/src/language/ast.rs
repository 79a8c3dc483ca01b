//! Syntax tree produced by the parser.
//!
//! Every node keeps its source span. [`Program::erase_spans`] clears them so
//! two trees can be compared structurally.

use super::span::Span;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Name of the file the block was parsed from.
    pub file: String,
    pub span: Span,
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    Vocabulary(VocabularyBlock),
    Theory(TheoryBlock),
    Structure(StructureBlock),
    Procedure(ProcedureBlock),
}

impl Block {
    pub fn name(&self) -> &Ident {
        match &self.kind {
            BlockKind::Vocabulary(b) => &b.name,
            BlockKind::Theory(b) => &b.name,
            BlockKind::Structure(b) => &b.name,
            BlockKind::Procedure(b) => &b.name,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            BlockKind::Vocabulary(_) => "vocabulary",
            BlockKind::Theory(_) => "theory",
            BlockKind::Structure(_) => "structure",
            BlockKind::Procedure(_) => "procedure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyBlock {
    pub name: Ident,
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Type(Ident),
    Predicate { name: Ident, args: Vec<Ident> },
    Constant { name: Ident, ty: Ident },
}

impl Decl {
    pub fn name(&self) -> &Ident {
        match self {
            Decl::Type(n) => n,
            Decl::Predicate { name, .. } | Decl::Constant { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryBlock {
    pub name: Ident,
    pub vocabulary: Ident,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub formula: Formula,
    /// Covers the formula and its terminating `.`.
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Ident,
    pub ty: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub kind: FormulaKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaKind {
    Bool(bool),
    Atom {
        pred: Ident,
        args: Vec<Ident>,
    },
    Eq(Ident, Ident),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Quant {
        q: Quantifier,
        vars: Vec<VarDecl>,
        body: Box<Formula>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureBlock {
    pub name: Ident,
    pub vocabulary: Ident,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interp {
    Total,
    CertainlyTrue,
    CertainlyFalse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub symbol: Ident,
    pub interp: Interp,
    pub value: AssignedValue,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignedValue {
    /// `{ a; b,c; ... }`
    Set(Vec<Vec<Ident>>),
    Bool(bool),
    Element(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcedureBlock {
    pub name: Ident,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign {
        targets: Vec<Ident>,
        value: Expr,
    },
    If {
        cond: Expr,
        then: Vec<Stmt>,
        otherwise: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Var(Ident),
    Call { name: Ident, args: Vec<Expr> },
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Program {
    pub fn erase_spans(&mut self) {
        for block in &mut self.blocks {
            block.span = Span::default();
            match &mut block.kind {
                BlockKind::Vocabulary(v) => {
                    erase(&mut v.name);
                    for d in &mut v.decls {
                        match d {
                            Decl::Type(n) => erase(n),
                            Decl::Predicate { name, args } => {
                                erase(name);
                                args.iter_mut().for_each(erase);
                            }
                            Decl::Constant { name, ty } => {
                                erase(name);
                                erase(ty);
                            }
                        }
                    }
                }
                BlockKind::Theory(t) => {
                    erase(&mut t.name);
                    erase(&mut t.vocabulary);
                    for s in &mut t.sentences {
                        s.span = Span::default();
                        s.formula.erase_spans();
                    }
                }
                BlockKind::Structure(s) => {
                    erase(&mut s.name);
                    erase(&mut s.vocabulary);
                    for a in &mut s.assignments {
                        a.span = Span::default();
                        erase(&mut a.symbol);
                        match &mut a.value {
                            AssignedValue::Set(tuples) => {
                                tuples.iter_mut().flatten().for_each(erase);
                            }
                            AssignedValue::Element(e) => erase(e),
                            AssignedValue::Bool(_) => {}
                        }
                    }
                }
                BlockKind::Procedure(p) => {
                    erase(&mut p.name);
                    p.body.iter_mut().for_each(Stmt::erase_spans);
                }
            }
        }
    }
}

fn erase(ident: &mut Ident) {
    ident.span = Span::default();
}

impl Formula {
    pub fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            FormulaKind::Bool(_) => {}
            FormulaKind::Atom { pred, args } => {
                erase(pred);
                args.iter_mut().for_each(erase);
            }
            FormulaKind::Eq(a, b) => {
                erase(a);
                erase(b);
            }
            FormulaKind::Not(f) => f.erase_spans(),
            FormulaKind::And(fs) | FormulaKind::Or(fs) => fs.iter_mut().for_each(Formula::erase_spans),
            FormulaKind::Implies(a, b) | FormulaKind::Equiv(a, b) => {
                a.erase_spans();
                b.erase_spans();
            }
            FormulaKind::Quant { vars, body, .. } => {
                for v in vars {
                    erase(&mut v.name);
                    if let Some(t) = &mut v.ty {
                        erase(t);
                    }
                }
                body.erase_spans();
            }
        }
    }
}

impl Stmt {
    pub fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            StmtKind::Assign { targets, value } => {
                targets.iter_mut().for_each(erase);
                value.erase_spans();
            }
            StmtKind::If { cond, then, otherwise } => {
                cond.erase_spans();
                then.iter_mut().for_each(Stmt::erase_spans);
                if let Some(o) = otherwise {
                    o.iter_mut().for_each(Stmt::erase_spans);
                }
            }
            StmtKind::While { cond, body } => {
                cond.erase_spans();
                body.iter_mut().for_each(Stmt::erase_spans);
            }
            StmtKind::Expr(e) => e.erase_spans(),
        }
    }
}

impl Expr {
    pub fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Int(_) | ExprKind::Str(_) | ExprKind::Bool(_) => {}
            ExprKind::Var(v) => erase(v),
            ExprKind::Call { name, args } => {
                erase(name);
                args.iter_mut().for_each(Expr::erase_spans);
            }
            ExprKind::Unary(_, e) => e.erase_spans(),
            ExprKind::Binary(_, a, b) => {
                a.erase_spans();
                b.erase_spans();
            }
        }
    }
}
