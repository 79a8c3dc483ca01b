//! Recursive-descent parser.
//!
//! Syntax errors never abort the whole document: after an error the parser
//! skips to the next block keyword, so each block reports at most one error.

use super::ast::*;
use super::diagnostic::Diagnostic;
use super::lexer::{tokenize, unescape, Token, TokenKind};
use super::span::{Pos, Span};

#[derive(Debug, Clone)]
struct ParseError {
    span: Span,
    message: String,
}

type PResult<T> = Result<T, ParseError>;

const BLOCK_KEYWORDS: &[&str] = &["vocabulary", "theory", "structure", "procedure"];
const ARITHMETIC: &[&str] = &["+", "-", "*", "/", "%", "<", ">", "<=", ">="];

/// Parse a whole document.
pub fn parse(file: &str, text: &str) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser::new(file, text);
    let mut blocks = Vec::new();
    let mut diagnostics = Vec::new();
    while let Some(tok) = p.peek() {
        if is_block_keyword(tok) {
            match p.block() {
                Ok(block) => blocks.push(block),
                Err(e) => {
                    diagnostics.push(Diagnostic::error(file, e.span, e.message));
                    p.recover();
                }
            }
        } else {
            let e = p.unexpected("a block (vocabulary, theory, structure or procedure)");
            diagnostics.push(Diagnostic::error(file, e.span, e.message));
            p.bump();
            p.recover();
        }
    }
    if diagnostics.is_empty() {
        Ok(Program { blocks })
    } else {
        Err(diagnostics)
    }
}

/// Parse a line of shell input: zero or more statements.
pub fn parse_commands(text: &str) -> Result<Vec<Stmt>, Diagnostic> {
    let mut p = Parser::new("<shell>", text);
    let mut stmts = Vec::new();
    let result: Result<(), ParseError> = (|| {
        while p.peek().is_some() {
            if p.eat_punct(";") {
                continue;
            }
            stmts.push(p.stmt()?);
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(stmts),
        Err(e) => Err(Diagnostic::error("<shell>", e.span, e.message)),
    }
}

fn is_block_keyword(tok: &Token) -> bool {
    tok.kind == TokenKind::Keyword && BLOCK_KEYWORDS.contains(&tok.lexeme.as_str())
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    eof: Pos,
}

impl<'a> Parser<'a> {
    fn new(file: &'a str, text: &str) -> Self {
        let toks = tokenize(text).into_iter().filter(|t| !t.kind.is_trivia()).collect();
        Parser {
            file,
            toks,
            pos: 0,
            eof: Pos::START.advance(text),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn recover(&mut self) {
        while let Some(tok) = self.peek() {
            if is_block_keyword(tok) {
                break;
            }
            self.pos += 1;
        }
    }

    fn here(&self) -> Span {
        match self.peek() {
            Some(t) => t.span(),
            None => Span::point(self.eof),
        }
    }

    fn prev_end(&self) -> Pos {
        if self.pos == 0 {
            Pos::START
        } else {
            self.toks[self.pos - 1].end()
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let message = match self.peek() {
            None => format!("expected {expected}, found end of input"),
            Some(t) if t.kind == TokenKind::Error => {
                if t.lexeme.starts_with("/*") {
                    "unterminated block comment".to_string()
                } else if t.lexeme.starts_with('"') {
                    "unterminated string literal".to_string()
                } else {
                    format!("unexpected character '{}'", t.lexeme)
                }
            }
            Some(t) => format!("expected {expected}, found '{}'", t.lexeme),
        };
        ParseError {
            span: self.here(),
            message,
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            span: self.here(),
            message: message.into(),
        }
    }

    fn at(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| t.is(kind, lexeme))
    }

    fn at_punct(&self, p: &str) -> bool {
        self.at(TokenKind::Punct, p)
    }

    fn at_logical(&self, l: &str) -> bool {
        self.at(TokenKind::Logical, l)
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.at(TokenKind::Keyword, k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_logical(&mut self, l: &str) -> bool {
        if self.at_logical(l) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str, what: &str) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.bump().unwrap().span())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let t = self.bump().unwrap();
                Ok(Ident::new(t.lexeme.clone(), t.span()))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    // ----- blocks -----

    fn block(&mut self) -> PResult<Block> {
        let kw = self.bump().expect("block keyword");
        let start = kw.start();
        let kind = match kw.lexeme.as_str() {
            "vocabulary" => BlockKind::Vocabulary(self.vocabulary()?),
            "theory" => BlockKind::Theory(self.theory()?),
            "structure" => BlockKind::Structure(self.structure()?),
            "procedure" => BlockKind::Procedure(self.procedure()?),
            _ => unreachable!("not a block keyword"),
        };
        Ok(Block {
            file: self.file.to_string(),
            span: Span::new(start, self.prev_end()),
            kind,
        })
    }

    fn close_block(&mut self, what: &str) -> PResult<bool> {
        if self.eat_punct("}") {
            return Ok(true);
        }
        if self.peek().is_none() {
            return Err(self.unexpected(&format!("'}}' to close the {what}")));
        }
        Ok(false)
    }

    fn vocabulary(&mut self) -> PResult<VocabularyBlock> {
        let name = self.ident("a vocabulary name")?;
        self.expect_punct("{", "'{'")?;
        let mut decls = Vec::new();
        while !self.close_block("vocabulary")? {
            decls.push(self.decl()?);
        }
        Ok(VocabularyBlock { name, decls })
    }

    fn decl(&mut self) -> PResult<Decl> {
        if self.at_keyword("type") {
            self.bump();
            return Ok(Decl::Type(self.ident("a type name")?));
        }
        let name = self.ident("a declaration (type, predicate or constant)")?;
        let mut args = Vec::new();
        let has_parens = self.eat_punct("(");
        if has_parens && !self.eat_punct(")") {
            loop {
                args.push(self.ident("a type name")?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",", "',' or ')'")?;
            }
        }
        if self.at_punct(":") {
            if has_parens {
                return Err(ParseError {
                    span: name.span.to(self.here()),
                    message: format!(
                        "functions are not supported: '{}' has arguments and a result type; \
                         declare a predicate or a constant",
                        name.name
                    ),
                });
            }
            self.bump();
            let ty = self.ident("a type name")?;
            return Ok(Decl::Constant { name, ty });
        }
        Ok(Decl::Predicate { name, args })
    }

    fn theory(&mut self) -> PResult<TheoryBlock> {
        let name = self.ident("a theory name")?;
        self.expect_punct(":", "':' followed by a vocabulary name")?;
        let vocabulary = self.ident("a vocabulary name")?;
        self.expect_punct("{", "'{'")?;
        let mut sentences = Vec::new();
        while !self.close_block("theory")? {
            if self.at_punct("{") {
                return Err(self.error_here("inductive definitions are not supported"));
            }
            let formula = self.formula()?;
            if !self.at_punct(".") {
                return Err(self.formula_trailer_error("'.' at the end of the sentence"));
            }
            let dot = self.bump().unwrap().span();
            let span = formula.span.to(dot);
            sentences.push(Sentence { formula, span });
        }
        Ok(TheoryBlock {
            name,
            vocabulary,
            sentences,
        })
    }

    fn formula_trailer_error(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Punct && ARITHMETIC.contains(&t.lexeme.as_str()) => {
                self.error_here("arithmetic is not supported")
            }
            Some(t) if t.kind == TokenKind::Number => self.error_here("numeric terms are not supported"),
            _ => self.unexpected(expected),
        }
    }

    fn structure(&mut self) -> PResult<StructureBlock> {
        let name = self.ident("a structure name")?;
        self.expect_punct(":", "':' followed by a vocabulary name")?;
        let vocabulary = self.ident("a vocabulary name")?;
        self.expect_punct("{", "'{'")?;
        let mut assignments = Vec::new();
        while !self.close_block("structure")? {
            assignments.push(self.assignment()?);
        }
        Ok(StructureBlock {
            name,
            vocabulary,
            assignments,
        })
    }

    fn assignment(&mut self) -> PResult<Assignment> {
        let symbol = self.ident("a symbol to interpret")?;
        let mut interp = Interp::Total;
        let mut equals_consumed = false;
        if self.eat_punct("<") {
            let which = self.ident("'ct' or 'cf'")?;
            interp = match which.name.as_str() {
                "ct" => Interp::CertainlyTrue,
                "cf" => Interp::CertainlyFalse,
                _ => {
                    return Err(ParseError {
                        span: which.span,
                        message: format!("expected 'ct' or 'cf', found '{}'", which.name),
                    })
                }
            };
            // `p<ct>= {..}` lexes the closing bracket together with `=`
            if self.eat_punct(">=") {
                equals_consumed = true;
            } else {
                self.expect_punct(">", "'>'")?;
            }
        }
        if !equals_consumed && !self.eat_logical("=") {
            return Err(self.unexpected("'='"));
        }
        let value = if self.eat_punct("{") {
            let mut tuples = Vec::new();
            if !self.eat_punct("}") {
                loop {
                    tuples.push(self.tuple()?);
                    if self.eat_punct("}") {
                        break;
                    }
                    self.expect_punct(";", "';' or '}'")?;
                    if self.eat_punct("}") {
                        break;
                    }
                }
            }
            AssignedValue::Set(tuples)
        } else if self.at_keyword("true") || self.at_keyword("false") {
            AssignedValue::Bool(self.bump().unwrap().lexeme == "true")
        } else {
            AssignedValue::Element(self.element()?)
        };
        Ok(Assignment {
            span: symbol.span.to(Span::point(self.prev_end())),
            symbol,
            interp,
            value,
        })
    }

    fn tuple(&mut self) -> PResult<Vec<Ident>> {
        let parens = self.eat_punct("(");
        let mut elems = vec![self.element()?];
        while self.eat_punct(",") {
            elems.push(self.element()?);
        }
        if parens {
            self.expect_punct(")", "')'")?;
        }
        Ok(elems)
    }

    fn element(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::Number) => {
                let t = self.bump().unwrap();
                Ok(Ident::new(t.lexeme.clone(), t.span()))
            }
            _ => Err(self.unexpected("a domain element")),
        }
    }

    fn procedure(&mut self) -> PResult<ProcedureBlock> {
        let name = self.ident("a procedure name")?;
        self.expect_punct("(", "'('")?;
        self.expect_punct(")", "')' (procedures take no parameters)")?;
        let body = self.stmt_block()?;
        Ok(ProcedureBlock { name, body })
    }

    // ----- formulas -----

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implication()?;
        if self.eat_logical("<=>") {
            let rhs = self.implication()?;
            let span = lhs.span.to(rhs.span);
            let mut f = Formula {
                kind: FormulaKind::Equiv(Box::new(lhs), Box::new(rhs)),
                span,
            };
            while self.eat_logical("<=>") {
                let rhs = self.implication()?;
                let span = f.span.to(rhs.span);
                f = Formula {
                    kind: FormulaKind::Equiv(Box::new(f), Box::new(rhs)),
                    span,
                };
            }
            return Ok(f);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat_logical("=>") {
            let rhs = self.implication()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Formula {
                kind: FormulaKind::Implies(Box::new(lhs), Box::new(rhs)),
                span,
            });
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let first = self.conjunction()?;
        if !self.at_logical("|") {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat_logical("|") {
            parts.push(self.conjunction()?);
        }
        let span = parts[0].span.to(parts.last().unwrap().span);
        Ok(Formula {
            kind: FormulaKind::Or(parts),
            span,
        })
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let first = self.unary()?;
        if !self.at_logical("&") {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat_logical("&") {
            parts.push(self.unary()?);
        }
        let span = parts[0].span.to(parts.last().unwrap().span);
        Ok(Formula {
            kind: FormulaKind::And(parts),
            span,
        })
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.at_logical("~") {
            let start = self.bump().unwrap().span();
            let inner = self.unary()?;
            let span = start.to(inner.span);
            return Ok(Formula {
                kind: FormulaKind::Not(Box::new(inner)),
                span,
            });
        }
        if self.at_logical("!") || self.at_logical("?") {
            let tok = self.bump().unwrap();
            let q = if tok.lexeme == "!" {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let vars = self.var_list()?;
            self.expect_punct(":", "':' after quantified variables")?;
            let body = self.formula()?;
            let span = tok.span().to(body.span);
            return Ok(Formula {
                kind: FormulaKind::Quant {
                    q,
                    vars,
                    body: Box::new(body),
                },
                span,
            });
        }
        self.primary_formula()
    }

    fn var_list(&mut self) -> PResult<Vec<VarDecl>> {
        let mut vars = Vec::new();
        loop {
            let name = self.ident("a variable name")?;
            let ty = if self.eat_punct("[") {
                let ty = self.ident("a type name")?;
                self.expect_punct("]", "']'")?;
                Some(ty)
            } else {
                None
            };
            vars.push(VarDecl { name, ty });
            let continues = self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
                && self.peek_at(1).is_some_and(|t| {
                    t.kind == TokenKind::Identifier || t.is(TokenKind::Punct, ":") || t.is(TokenKind::Punct, "[")
                });
            if !continues {
                return Ok(vars);
            }
        }
    }

    fn primary_formula(&mut self) -> PResult<Formula> {
        if self.at_punct("(") {
            self.bump();
            let inner = self.formula()?;
            if !self.at_punct(")") {
                return Err(self.formula_trailer_error("')'"));
            }
            self.bump();
            return Ok(inner);
        }
        if self.at_keyword("true") || self.at_keyword("false") {
            let t = self.bump().unwrap();
            return Ok(Formula {
                kind: FormulaKind::Bool(t.lexeme == "true"),
                span: t.span(),
            });
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {}
            Some(t) if t.kind == TokenKind::Number => return Err(self.error_here("numeric terms are not supported")),
            _ => return Err(self.unexpected("a formula")),
        }
        let name = self.ident("a predicate")?;
        if self.eat_punct("(") {
            let mut args = Vec::new();
            if !self.eat_punct(")") {
                loop {
                    args.push(self.term()?);
                    if self.at_punct(")") {
                        break;
                    }
                    if !self.eat_punct(",") {
                        return Err(self.formula_trailer_error("',' or ')'"));
                    }
                }
            }
            let close = self.bump().unwrap().span();
            if self.at_logical("=") {
                return Err(ParseError {
                    span: name.span.to(close),
                    message: format!(
                        "functions are not supported: '{}(...)' cannot be used as a term",
                        name.name
                    ),
                });
            }
            return Ok(Formula {
                span: name.span.to(close),
                kind: FormulaKind::Atom { pred: name, args },
            });
        }
        if self.eat_logical("=") {
            let rhs = self.term()?;
            return Ok(Formula {
                span: name.span.to(rhs.span),
                kind: FormulaKind::Eq(name, rhs),
            });
        }
        Ok(Formula {
            span: name.span,
            kind: FormulaKind::Atom {
                pred: name,
                args: Vec::new(),
            },
        })
    }

    fn term(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Number => return Err(self.error_here("numeric terms are not supported")),
            Some(t) if t.kind == TokenKind::Identifier => {}
            _ => return Err(self.unexpected("a term")),
        }
        let name = self.ident("a term")?;
        if self.at_punct("(") {
            return Err(ParseError {
                span: name.span,
                message: format!(
                    "functions are not supported: '{}(...)' cannot be used as a term",
                    name.name
                ),
            });
        }
        Ok(name)
    }

    // ----- statements -----

    fn stmt_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{", "'{'")?;
        let mut stmts = Vec::new();
        loop {
            if self.eat_punct(";") {
                continue;
            }
            if self.close_block("statement block")? {
                return Ok(stmts);
            }
            stmts.push(self.stmt()?);
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.here();
        if self.at_keyword("if") {
            self.bump();
            let cond = self.expr()?;
            let then = self.stmt_block()?;
            let otherwise = if self.at_keyword("else") {
                self.bump();
                if self.at_keyword("if") {
                    Some(vec![self.stmt()?])
                } else {
                    Some(self.stmt_block()?)
                }
            } else {
                None
            };
            return Ok(Stmt {
                kind: StmtKind::If { cond, then, otherwise },
                span: start.to(Span::point(self.prev_end())),
            });
        }
        if self.at_keyword("while") {
            self.bump();
            let cond = self.expr()?;
            let body = self.stmt_block()?;
            return Ok(Stmt {
                kind: StmtKind::While { cond, body },
                span: start.to(Span::point(self.prev_end())),
            });
        }
        let is_assign = self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
            && self
                .peek_at(1)
                .is_some_and(|t| t.is(TokenKind::Punct, ":=") || t.is(TokenKind::Punct, ","));
        if is_assign {
            let mut targets = vec![self.ident("a variable")?];
            while self.eat_punct(",") {
                targets.push(self.ident("a variable")?);
            }
            self.expect_punct(":=", "':='")?;
            let value = self.expr()?;
            let span = start.to(value.span);
            return Ok(Stmt {
                kind: StmtKind::Assign { targets, value },
                span,
            });
        }
        if self.peek().is_none() || self.at_punct("}") {
            return Err(self.unexpected("a statement"));
        }
        // Only calls may stand alone; anything else would make statement
        // boundaries ambiguous without separators.
        let at_call = self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_at(1).is_some_and(|t| t.is(TokenKind::Punct, "("));
        if !at_call {
            return Err(self.unexpected("a statement (assignment, call, if or while)"));
        }
        let e = self.expr()?;
        Ok(Stmt {
            span: e.span,
            kind: StmtKind::Expr(e),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> PResult<Expr> {
        // levels: 0 `|`, 1 `&`, 2 `~`, 3 comparison, 4 additive, 5 multiplicative
        match level {
            0 | 1 => {
                let (sym, op) = if level == 0 {
                    ("|", BinOp::Or)
                } else {
                    ("&", BinOp::And)
                };
                let mut lhs = self.binary_level(level + 1)?;
                while self.eat_logical(sym) {
                    let rhs = self.binary_level(level + 1)?;
                    lhs = binary(op, lhs, rhs);
                }
                Ok(lhs)
            }
            2 => {
                if self.at_logical("~") {
                    let start = self.bump().unwrap().span();
                    let inner = self.binary_level(2)?;
                    let span = start.to(inner.span);
                    return Ok(Expr {
                        kind: ExprKind::Unary(UnOp::Not, Box::new(inner)),
                        span,
                    });
                }
                self.binary_level(3)
            }
            3 => {
                let lhs = self.binary_level(4)?;
                let op = match self.peek() {
                    Some(t) if t.kind == TokenKind::Punct => match t.lexeme.as_str() {
                        "==" => Some(BinOp::Eq),
                        "!=" => Some(BinOp::Ne),
                        "<" => Some(BinOp::Lt),
                        "<=" => Some(BinOp::Le),
                        ">" => Some(BinOp::Gt),
                        ">=" => Some(BinOp::Ge),
                        _ => None,
                    },
                    _ => None,
                };
                match op {
                    Some(op) => {
                        self.bump();
                        let rhs = self.binary_level(4)?;
                        Ok(binary(op, lhs, rhs))
                    }
                    None => Ok(lhs),
                }
            }
            4 | 5 => {
                let mut lhs = self.binary_level(level + 1)?;
                loop {
                    let op = match self.peek() {
                        Some(t) if t.kind == TokenKind::Punct => match (level, t.lexeme.as_str()) {
                            (4, "+") => BinOp::Add,
                            (4, "-") => BinOp::Sub,
                            (5, "*") => BinOp::Mul,
                            (5, "/") => BinOp::Div,
                            (5, "%") => BinOp::Rem,
                            _ => break,
                        },
                        _ => break,
                    };
                    self.bump();
                    let rhs = self.binary_level(level + 1)?;
                    lhs = binary(op, lhs, rhs);
                }
                Ok(lhs)
            }
            _ => self.unary_expr(),
        }
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.at_punct("-") {
            let start = self.bump().unwrap().span();
            let inner = self.unary_expr()?;
            let span = start.to(inner.span);
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Neg, Box::new(inner)),
                span,
            });
        }
        self.primary_expr()
    }

    fn primary_expr(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("an expression"));
        };
        let span = tok.span();
        let kind = match tok.kind {
            TokenKind::Number => {
                self.bump();
                let n = tok.lexeme.parse::<i64>().map_err(|_| ParseError {
                    span,
                    message: "integer literal out of range".to_string(),
                })?;
                ExprKind::Int(n)
            }
            TokenKind::String => {
                self.bump();
                ExprKind::Str(unescape(&tok.lexeme))
            }
            TokenKind::Keyword if tok.lexeme == "true" || tok.lexeme == "false" => {
                self.bump();
                ExprKind::Bool(tok.lexeme == "true")
            }
            TokenKind::Identifier => {
                let name = self.ident("a name")?;
                if self.eat_punct("(") {
                    let mut args = Vec::new();
                    if !self.eat_punct(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat_punct(")") {
                                break;
                            }
                            self.expect_punct(",", "',' or ')'")?;
                        }
                    }
                    return Ok(Expr {
                        span: name.span.to(Span::point(self.prev_end())),
                        kind: ExprKind::Call { name, args },
                    });
                }
                return Ok(Expr {
                    span: name.span,
                    kind: ExprKind::Var(name),
                });
            }
            TokenKind::Punct if tok.lexeme == "(" => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(")", "')'")?;
                return Ok(inner);
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(Expr { kind, span })
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    Expr {
        kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        span,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::span::Range;

    const FIG3: &str = "vocabulary V { type Animal fly(Animal) } theory T: V { !x: fly(x). }";

    fn first_error(text: &str) -> Diagnostic {
        parse("t.idp", text).unwrap_err().remove(0)
    }

    #[test]
    fn penguin_program_has_two_blocks() {
        let p = parse("t.idp", FIG3).unwrap();
        assert_eq!(p.blocks.len(), 2);
        let BlockKind::Theory(t) = &p.blocks[1].kind else {
            panic!("expected theory")
        };
        assert_eq!(t.sentences.len(), 1);
        assert_eq!(t.sentences[0].span.text(FIG3), "!x: fly(x).");
    }

    #[test]
    fn missing_colon_points_at_predicate() {
        let d = first_error("theory T: V { !x fly(x). }");
        assert_eq!(
            d.range,
            Range {
                line: 1,
                col: 18,
                end_line: 1,
                end_col: 21
            }
        );
        assert!(d.message.contains("':'"), "{}", d.message);
    }

    #[test]
    fn empty_vocabulary() {
        let p = parse("t.idp", "vocabulary V {}").unwrap();
        let BlockKind::Vocabulary(v) = &p.blocks[0].kind else {
            panic!()
        };
        assert!(v.decls.is_empty());
    }

    #[test]
    fn missing_dot_reported_at_closing_brace() {
        let d = first_error("theory T: V {\n  !x: fly(x)\n}");
        assert_eq!(d.range.start(), (3, 1));
        assert!(d.message.contains("'.'"));
    }

    #[test]
    fn each_block_reports_one_error() {
        let text = "vocabulary V { type }\ntheory T : V { p( . }\nstructure S : V { }";
        let diags = parse("t.idp", text).unwrap_err();
        assert_eq!(diags.len(), 2);
        assert_eq!(diags[0].range.line, 1);
        assert_eq!(diags[1].range.line, 2);
    }

    #[test]
    fn unsupported_constructs_fail_loudly() {
        assert!(first_error("vocabulary V { type T f(T) : T }")
            .message
            .contains("functions are not supported"));
        assert!(first_error("theory T : V { { p <- q. } }")
            .message
            .contains("inductive definitions"));
        assert!(first_error("theory T : V { !x: p(x) + 1. }")
            .message
            .contains("arithmetic"));
    }

    #[test]
    fn precedence_and_quantifier_scope() {
        let p = parse("t", "theory T : V { !x y: p(x) & q(y) | ~r => s <=> t. }").unwrap();
        let BlockKind::Theory(t) = &p.blocks[0].kind else {
            panic!()
        };
        let FormulaKind::Quant { vars, body, .. } = &t.sentences[0].formula.kind else {
            panic!("quantifier should scope over the whole sentence")
        };
        assert_eq!(vars.len(), 2);
        let FormulaKind::Equiv(lhs, _) = &body.kind else {
            panic!("<=> binds weakest")
        };
        let FormulaKind::Implies(lhs, _) = &lhs.kind else {
            panic!()
        };
        assert!(matches!(lhs.kind, FormulaKind::Or(_)));
    }

    #[test]
    fn structure_forms() {
        let text =
            "structure S : V { Animal = { penguin; eagle } fly<ct>= {eagle} r = { a,b; (c,d) } p = true c = penguin }";
        let p = parse("t", text).unwrap();
        let BlockKind::Structure(s) = &p.blocks[0].kind else {
            panic!()
        };
        assert_eq!(s.assignments.len(), 5);
        assert_eq!(s.assignments[1].interp, Interp::CertainlyTrue);
        let AssignedValue::Set(tuples) = &s.assignments[2].value else {
            panic!()
        };
        assert_eq!(tuples.len(), 2);
        assert_eq!(tuples[1].len(), 2);
    }

    #[test]
    fn procedure_statements() {
        let text = r#"procedure main() { x := ask("name?") print(x) if x == "bob" { print(1) } else { exit(2) } while ~done { done := true } }"#;
        let p = parse("t", text).unwrap();
        let BlockKind::Procedure(proc_) = &p.blocks[0].kind else {
            panic!()
        };
        assert_eq!(proc_.body.len(), 4);
    }

    #[test]
    fn shell_commands() {
        assert_eq!(parse_commands("modelexpand(T, S)").unwrap().len(), 1);
        assert!(parse_commands("nonsense(").is_err());
        assert_eq!(parse_commands("").unwrap().len(), 0);
        assert_eq!(parse_commands("x, y := onclick()").unwrap().len(), 1);
    }
}
