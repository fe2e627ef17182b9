// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Rate expressions: a small recursive-descent parser over
//! `+ - * / ^`, parentheses, the time variable `t`, named parameters and a
//! fixed set of elementary functions.
//!
//! Precedence, tightest first: `^` (right-associative), unary `-`, `* /`,
//! `+ -`. So `-2^2 == -4` and `2^3^2 == 512`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::scalar::Real;

/// Name of the time variable inside rate expressions.
pub const TIME_VAR: &str = "t";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed rate expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Time,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbalanced parentheses at byte {offset}")]
    UnbalancedParentheses { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UnbalancedParentheses { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} undefined at {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{base}^{exponent} is undefined")]
    Power { base: f64, exponent: f64 },
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("non-finite intermediate value")]
    NonFinite,
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token { tok: Tok::Op(c as char), offset: i });
                i += 1;
            }
            b'(' => {
                out.push(Token { tok: Tok::LParen, offset: i });
                i += 1;
            }
            b')' => {
                out.push(Token { tok: Tok::RParen, offset: i });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{text}`") })?;
                out.push(Token { tok: Tok::Num(value), offset: start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(src[start..i].to_string()), offset: start });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { offset: i, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    end: usize,
    open: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            None => match self.open.last() {
                Some(&o) => ParseError::UnbalancedParentheses { offset: o },
                None => ParseError::Syntax { offset: self.end, message: "unexpected end of input".into() },
            },
            Some(Token { tok: Tok::RParen, offset }) if self.open.is_empty() => {
                ParseError::UnbalancedParentheses { offset: *offset }
            }
            Some(t) => ParseError::Syntax { offset: t.offset, message: format!("unexpected token {:?}", t.tok) },
        }
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        if let Some(Token { tok: Tok::Op(c), .. }) = self.peek() {
            if ops.contains(c) {
                self.pos += 1;
                return Some(*c);
            }
        }
        None
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.eat_op(&['-', '+']) {
            Some('-') => Ok(Expr::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            // exponent may carry its own sign and is right-associative
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected());
        };
        match &tok.tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Const(*v))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let call = matches!(self.peek(), Some(Token { tok: Tok::LParen, .. }));
                if call {
                    let func = Func::from_name(name)
                        .ok_or_else(|| ParseError::UnknownFunction { name: name.clone(), offset: tok.offset })?;
                    let arg = self.parenthesized()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if name == TIME_VAR {
                    Ok(Expr::Time)
                } else {
                    Ok(Expr::Param(name.clone()))
                }
            }
            Tok::LParen => self.parenthesized(),
            _ => Err(self.unexpected()),
        }
    }

    fn parenthesized(&mut self) -> Result<Expr, ParseError> {
        let open = self.here();
        self.pos += 1;
        self.open.push(open);
        let inner = self.expr()?;
        match self.peek() {
            Some(Token { tok: Tok::RParen, .. }) => {
                self.pos += 1;
                self.open.pop();
                Ok(inner)
            }
            None => Err(ParseError::UnbalancedParentheses { offset: open }),
            Some(_) => Err(self.unexpected()),
        }
    }
}

impl Expr {
    /// Parses a rate expression.
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        let toks = lex(source)?;
        if toks.is_empty() {
            return Err(ParseError::Syntax { offset: 0, message: "empty expression".into() });
        }
        let mut p = Parser { toks: &toks, pos: 0, end: source.len(), open: Vec::new() };
        let e = p.expr()?;
        if p.pos < toks.len() {
            return Err(p.unexpected());
        }
        Ok(e)
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    /// Names of all parameters referenced by the expression.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_params(out),
            Expr::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Const(_) | Expr::Time => {}
        }
    }

    /// Evaluates at time `t` with parameters looked up by name.
    pub fn eval<T: Real>(&self, t: T, params: &BTreeMap<String, f64>) -> Result<T, EvalError> {
        self.bind(params)?.eval(t)
    }

    /// Substitutes every parameter by its value.
    pub fn bind(&self, params: &BTreeMap<String, f64>) -> Result<BoundExpr, EvalError> {
        Ok(BoundExpr(self.substitute(params)?))
    }

    fn substitute(&self, params: &BTreeMap<String, f64>) -> Result<Expr, EvalError> {
        Ok(match self {
            Expr::Param(p) => Expr::Const(*params.get(p).ok_or_else(|| EvalError::MissingParameter(p.clone()))?),
            Expr::Const(_) | Expr::Time => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(params)?)),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(params)?)),
            Expr::Binary(op, a, b) => {
                Expr::Binary(*op, Box::new(a.substitute(params)?), Box::new(b.substitute(params)?))
            }
        })
    }
}

/// An expression with all parameters substituted; only `t` remains free.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundExpr(Expr);

impl BoundExpr {
    pub fn eval<T: Real>(&self, t: T) -> Result<T, EvalError> {
        eval_node(&self.0, t)
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }
}

fn finite<T: Real>(v: T) -> Result<T, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_node<T: Real>(e: &Expr, t: T) -> Result<T, EvalError> {
    match e {
        Expr::Const(c) => finite(T::from_f64(*c).ok_or(EvalError::NonFinite)?),
        Expr::Time => Ok(t),
        Expr::Param(p) => Err(EvalError::MissingParameter(p.clone())),
        Expr::Neg(a) => Ok(-eval_node(a, t)?),
        Expr::Binary(op, a, b) => {
            let x = eval_node(a, t)?;
            let y = eval_node(b, t)?;
            match op {
                BinOp::Add => finite(x + y),
                BinOp::Sub => finite(x - y),
                BinOp::Mul => finite(x * y),
                BinOp::Div => {
                    if y == T::zero() {
                        Err(EvalError::DivisionByZero)
                    } else {
                        finite(x / y)
                    }
                }
                BinOp::Pow => {
                    let power_err = || EvalError::Power { base: x.to_f64_lossy(), exponent: y.to_f64_lossy() };
                    if x == T::zero() && y < T::zero() {
                        return Err(power_err());
                    }
                    let v = x.powf(y);
                    if v.is_nan() {
                        Err(power_err())
                    } else {
                        finite(v)
                    }
                }
            }
        }
        Expr::Call(f, a) => {
            let x = eval_node(a, t)?;
            let domain = |func| EvalError::Domain { func, arg: x.to_f64_lossy() };
            let v = match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= T::zero() {
                        return Err(domain("ln"));
                    }
                    x.ln()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
                Func::Sqrt => {
                    if x < T::zero() {
                        return Err(domain("sqrt"));
                    }
                    x.sqrt()
                }
                Func::Abs => x.abs(),
            };
            finite(v)
        }
    }
}

// ---------------------------------------------------------------------------
// rendering

struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        let a = v.abs();
        let body = if v == 0.0 || (1e-4..1e15).contains(&a) { format!("{a}") } else { format!("{a:e}") };
        if v.is_sign_negative() && v != 0.0 {
            write!(f, "(-{body})")
        } else {
            f.write_str(&body)
        }
    }
}

macro_rules! expr_op {
    ($trait:ident, $method:ident, $op:ident) => {
        impl std::ops::$trait for Expr {
            type Output = Expr;

            fn $method(self, rhs: Expr) -> Expr {
                Expr::Binary(BinOp::$op, Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_op!(Add, add, Add);
expr_op!(Sub, sub, Sub);
expr_op!(Mul, mul, Mul);
expr_op!(Div, div, Div);

/// Fully parenthesized rendering that re-parses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{}", Num(*v)),
            Expr::Time => f.write_str(TIME_VAR),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
