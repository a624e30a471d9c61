//! Lexer and recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('^' | '*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := factor ('^' '-'? integer)*
//! factor := call '(' expr (',' expr)* ')' | ident | number | '(' expr ')'
//! ```
//! Calls are `d`, `i_`, `L_`, `sn`, `jb`, `cup` and `psi`. A `^` followed by
//! an integer literal is a power and binds tighter than `*`; on a form of
//! positive degree it multiplies by the integer instead.

use std::fmt;

use num::BigInt;

use super::CliError;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    /// `^`.
    Wedge,
    /// `*`; the same product as `^`.
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Call {
    D,
    Interior,
    Lie,
    Schouten,
    Jacobi,
    Cup,
    Psi,
}

impl Call {
    fn from_name(name: &str) -> Option<Call> {
        Some(match name {
            "d" => Call::D,
            "i_" => Call::Interior,
            "L_" => Call::Lie,
            "sn" => Call::Schouten,
            "jb" => Call::Jacobi,
            "cup" => Call::Cup,
            "psi" => Call::Psi,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Call::D | Call::Psi => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Call::D => "d",
            Call::Interior => "i_",
            Call::Lie => "L_",
            Call::Schouten => "sn",
            Call::Jacobi => "jb",
            Call::Cup => "cup",
            Call::Psi => "psi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Number(BigInt),
    Ident(String),
    Neg(Box<Expr>),
    Power(Box<Expr>, BigInt),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Call, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Number(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { chars: src.chars().peekable(), pos: Pos { line: 1, column: 1 } }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, CliError> {
        let mut out = Vec::new();
        loop {
            while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
                self.bump();
            }
            let start = self.pos;
            let Some(&c) = self.chars.peek() else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            if c.is_ascii_digit() {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    self.bump();
                }
                out.push((Tok::Number(s.parse().expect("digits")), start));
            } else if c.is_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                    s.push(d);
                    self.bump();
                }
                out.push((Tok::Ident(s), start));
            } else if "+-*/^(),".contains(c) {
                self.bump();
                out.push((Tok::Sym(c), start));
            } else {
                return Err(CliError::Syntax { pos: start, message: format!("unexpected character `{c}`") });
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), CliError> {
        match self.next() {
            (Tok::Sym(s), _) if s == c => Ok(()),
            (t, pos) => Err(CliError::Syntax { pos, message: format!("expected `{c}`, found {}", describe(&t)) }),
        }
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinaryOp::Add,
                Tok::Sym('-') => BinaryOp::Sub,
                _ => return Ok(left),
            };
            let pos = self.next().1;
            let right = self.term()?;
            left = Expr { kind: ExprKind::Binary(op, Box::new(left), Box::new(right)), pos };
        }
    }

    fn term(&mut self) -> Result<Expr, CliError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('^') => BinaryOp::Wedge,
                Tok::Sym('*') => BinaryOp::Mul,
                Tok::Sym('/') => BinaryOp::Div,
                _ => return Ok(left),
            };
            let pos = self.next().1;
            let right = self.unary()?;
            left = Expr { kind: ExprKind::Binary(op, Box::new(left), Box::new(right)), pos };
        }
    }

    fn unary(&mut self) -> Result<Expr, CliError> {
        if matches!(self.peek(), Tok::Sym('-')) {
            let pos = self.next().1;
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos });
        }
        let mut base = self.factor()?;
        while let Some((exponent, pos)) = self.exponent() {
            base = Expr { kind: ExprKind::Power(Box::new(base), exponent), pos };
        }
        Ok(base)
    }

    /// Consumes `^ integer` or `^ - integer` when present.
    fn exponent(&mut self) -> Option<(BigInt, Pos)> {
        if !matches!(self.peek(), Tok::Sym('^')) {
            return None;
        }
        let ahead = |k: usize| self.toks.get(self.at + k).map(|t| &t.0);
        let (value, width) = match (ahead(1), ahead(2)) {
            (Some(Tok::Number(n)), _) => (n.clone(), 2),
            (Some(Tok::Sym('-')), Some(Tok::Number(n))) => (-n.clone(), 3),
            _ => return None,
        };
        let pos = self.pos();
        self.at += width;
        Some((value, pos))
    }

    fn factor(&mut self) -> Result<Expr, CliError> {
        let (tok, pos) = self.next();
        match tok {
            Tok::Number(n) => Ok(Expr { kind: ExprKind::Number(n), pos }),
            Tok::Ident(name) => {
                if !matches!(self.peek(), Tok::Sym('(')) {
                    return Ok(Expr { kind: ExprKind::Ident(name), pos });
                }
                let Some(call) = Call::from_name(&name) else {
                    return Err(CliError::Syntax { pos, message: format!("unknown function `{name}`") });
                };
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while matches!(self.peek(), Tok::Sym(',')) {
                    self.next();
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                if args.len() != call.arity() {
                    return Err(CliError::Syntax {
                        pos,
                        message: format!("`{}` takes {} argument(s), got {}", call.name(), call.arity(), args.len()),
                    });
                }
                Ok(Expr { kind: ExprKind::Call(call, args), pos })
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(CliError::Syntax { pos, message: format!("expected an operand, found {}", describe(&t)) }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Number(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

pub fn parse(input: &str) -> Result<Expr, CliError> {
    let toks = Lexer::new(input).tokens()?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(CliError::Syntax { pos: p.pos(), message: format!("unexpected {} after expression", describe(t)) }),
    }
}
