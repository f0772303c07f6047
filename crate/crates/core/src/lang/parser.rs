//! Recursive-descent parser for the input language.
//!
//! ```text
//! program  := { "int" ident ";" } { stmt }
//! stmt     := ident "=" expr ";" | "if" "(" cond ")" block [ "else" block ]
//!           | "while" "(" cond ")" block | "assert" "(" cond ")" ";"
//!           | "assume" "(" cond ")" ";" | "havoc" ident ";"
//! block    := "{" { stmt } "}"
//! ```

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use super::expr::{ArithOp, CmpOp, Expr, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign(Var, Expr),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    While(Expr, Vec<Stmt>),
    Assert(Expr),
    Assume(Expr),
    Havoc(Var),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Var>,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    NonLinear,
    Undeclared(String),
    Duplicate(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::NonLinear => f.write_str("non-linear arithmetic"),
            ParseErrorKind::Undeclared(v) => write!(f, "use of undeclared variable `{v}`"),
            ParseErrorKind::Duplicate(v) => write!(f, "duplicate declaration of `{v}`"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 18] = [
    "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}", ";", "=", "<", ">", "+", "-", "*",
    "!",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push((Tok::Ident(s), start.0, start.1));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push((Tok::Int(s.parse().expect("digits")), start.0, start.1));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym = SYMBOLS.iter().find(|s| rest.starts_with(*s));
        match sym {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), start.0, start.1));
            }
            None => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                })
            }
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

const KEYWORDS: [&str; 9] = [
    "int", "if", "else", "while", "assert", "assume", "havoc", "true", "false",
];

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    declared: Option<HashSet<String>>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, declared: Option<HashSet<String>>) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            declared,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let (_, line, col) = &self.toks[self.pos];
        ParseError {
            line: *line,
            col: *col,
            kind,
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(self.error_here(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {}",
            self.peek()
        ))))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> PResult<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.unexpected(&format!("`{sym}`"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn use_var(&mut self) -> PResult<Var> {
        let at = self.pos;
        let name = self.ident()?;
        if let Some(decl) = &self.declared {
            if !decl.contains(&name) {
                self.pos = at;
                return Err(self.error_here(ParseErrorKind::Undeclared(name)));
            }
        }
        Ok(Var::new(&name))
    }

    fn program(&mut self) -> PResult<Program> {
        let mut prog = Program::default();
        let mut seen = HashSet::new();
        while self.is_keyword("int") {
            self.bump();
            let at = self.pos;
            let name = self.ident()?;
            if !seen.insert(name.clone()) {
                self.pos = at;
                return Err(self.error_here(ParseErrorKind::Duplicate(name)));
            }
            prog.decls.push(Var::new(&name));
            self.expect(";")?;
        }
        self.declared = Some(seen);
        while *self.peek() != Tok::Eof {
            prog.body.push(self.stmt()?);
        }
        Ok(prog)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.eat("}") {
            if *self.peek() == Tok::Eof {
                return self.unexpected("`}`");
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn paren_cond(&mut self) -> PResult<Expr> {
        self.expect("(")?;
        let c = self.cond()?;
        self.expect(")")?;
        Ok(c)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.unexpected("statement"),
        };
        match kw.as_str() {
            "if" => {
                self.bump();
                let c = self.paren_cond()?;
                let then = self.block()?;
                let els = if self.is_keyword("else") {
                    self.bump();
                    if self.is_keyword("if") {
                        Some(vec![self.stmt()?])
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                Ok(Stmt::If(c, then, els))
            }
            "while" => {
                self.bump();
                let c = self.paren_cond()?;
                Ok(Stmt::While(c, self.block()?))
            }
            "assert" | "assume" => {
                self.bump();
                let c = self.paren_cond()?;
                self.expect(";")?;
                Ok(if kw == "assert" {
                    Stmt::Assert(c)
                } else {
                    Stmt::Assume(c)
                })
            }
            "havoc" => {
                self.bump();
                let v = self.use_var()?;
                self.expect(";")?;
                Ok(Stmt::Havoc(v))
            }
            "int" => Err(self.error_here(ParseErrorKind::Syntax(
                "declarations must precede statements".into(),
            ))),
            _ => {
                let v = self.use_var()?;
                self.expect("=")?;
                let e = self.arith()?;
                self.expect(";")?;
                Ok(Stmt::Assign(v, e))
            }
        }
    }

    pub fn cond(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_cond()?;
        while self.eat("||") {
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and_cond()?));
        }
        Ok(lhs)
    }

    fn and_cond(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_cond()?;
        while self.eat("&&") {
            lhs = Expr::And(Box::new(lhs), Box::new(self.unary_cond()?));
        }
        Ok(lhs)
    }

    fn unary_cond(&mut self) -> PResult<Expr> {
        if self.eat("!") {
            return Ok(Expr::negation(self.unary_cond()?));
        }
        if self.is_keyword("true") || self.is_keyword("false") {
            let b = self.is_keyword("true");
            self.bump();
            return Ok(Expr::Bool(b));
        }
        let start = self.pos;
        match self.comparison() {
            Ok(e) => Ok(e),
            Err(err) if matches!(err.kind, ParseErrorKind::Syntax(_)) => {
                let after = self.pos;
                self.pos = start;
                if matches!(self.peek(), Tok::Sym("(")) {
                    match self.paren_cond() {
                        Ok(c) => Ok(c),
                        Err(e2) => {
                            // Report whichever attempt got further.
                            if self.pos >= after {
                                Err(e2)
                            } else {
                                Err(err)
                            }
                        }
                    }
                } else {
                    Err(err)
                }
            }
            Err(err) => Err(err),
        }
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.arith()?;
        let op = match self.peek() {
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            _ => return self.unexpected("comparison operator"),
        };
        self.bump();
        let rhs = self.arith()?;
        Ok(Expr::cmp(op, lhs, rhs))
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat("+") {
                ArithOp::Add
            } else if self.eat("-") {
                ArithOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::arith(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Tok::Sym("*")) {
            let at = self.pos;
            self.bump();
            let rhs = self.unary()?;
            if !lhs.is_constant() && !rhs.is_constant() {
                self.pos = at;
                return Err(self.error_here(ParseErrorKind::NonLinear));
            }
            lhs = Expr::arith(ArithOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.use_var()?)),
            Tok::Sym("(") => {
                self.bump();
                let e = self.arith()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.unexpected("expression"),
        }
    }

    fn finish<T>(&mut self, v: T) -> PResult<T> {
        if *self.peek() == Tok::Eof {
            Ok(v)
        } else {
            self.unexpected("end of input")
        }
    }
}

/// Parses a whole program.
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(source, None)?;
    let prog = p.program()?;
    p.finish(prog)
}

/// Parses a standalone condition (no declaration checks).
pub fn parse_condition(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, None)?;
    let c = p.cond()?;
    p.finish(c)
}

/// Parses a standalone arithmetic expression (no declaration checks).
pub fn parse_arith(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, None)?;
    let e = p.arith()?;
    p.finish(e)
}
