//! Arithmetic expressions over the naturals.
//!
//! Grammar (whitespace is free between tokens):
//!
//! ```text
//! expr  := term { ("+" | "-") term }          left associative
//! term  := atom { ("*" | "/" | "%") atom }     left associative
//! atom  := nat | var | "(" expr ")"
//!        | "min" "(" expr "," expr ")"
//!        | "max" "(" expr "," expr ")"
//!        | "eq" "(" expr "," expr "," expr "," expr ")"
//! var   := "x" digits        (x1, x2, ...; `x`, `y`, `z` abbreviate x1, x2, x3)
//! ```
//!
//! `-` is truncated subtraction, `/` is floor division and `%` the matching
//! remainder. Division by zero yields `0` and `a % 0` yields `a`, so that
//! `a == (a / b) * b + a % b` holds for every `b`. `eq(a, b, c, d)` is `c`
//! when `a == b` and `d` otherwise.
//!
//! Evaluation is exact: it runs on `u64` and falls back to big integers when
//! an intermediate result overflows. A final value above `u64::MAX` is
//! clamped to `u64::MAX`, which lies beyond every horizon used here.
//!
//! Printing produces the canonical text that parses back to the same tree.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::parse::{Cursor, ParseError, MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Monus,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Monus => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Monus => 1,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(u64),
    /// 1-based variable index.
    Var(usize),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut cur = Cursor::new(src);
        let e = parse_expr(&mut cur, 0)?;
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Largest variable index used, `0` for closed expressions.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => *i,
            Expr::Bin(_, l, r) | Expr::Min(l, r) | Expr::Max(l, r) => l.max_var().max(r.max_var()),
            Expr::Eq(a, b, c, d) => a.max_var().max(b.max_var()).max(c.max_var()).max(d.max_var()),
        }
    }

    /// Evaluates with `x[i - 1]` bound to variable `i`.
    ///
    /// Panics if a variable index exceeds `x.len()`.
    pub fn eval(&self, x: &[u64]) -> u64 {
        match self.eval_small(x) {
            Some(v) => v,
            None => self.eval_big(x).to_u64().unwrap_or(u64::MAX),
        }
    }

    fn eval_small(&self, x: &[u64]) -> Option<u64> {
        Some(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i - 1],
            Expr::Bin(op, l, r) => {
                let a = l.eval_small(x)?;
                let b = r.eval_small(x)?;
                match op {
                    BinOp::Add => a.checked_add(b)?,
                    BinOp::Monus => a.saturating_sub(b),
                    BinOp::Mul => a.checked_mul(b)?,
                    BinOp::Div => a.checked_div(b).unwrap_or(0),
                    BinOp::Mod => a.checked_rem(b).unwrap_or(a),
                }
            }
            Expr::Min(l, r) => l.eval_small(x)?.min(r.eval_small(x)?),
            Expr::Max(l, r) => l.eval_small(x)?.max(r.eval_small(x)?),
            Expr::Eq(a, b, c, d) => {
                if a.eval_small(x)? == b.eval_small(x)? {
                    c.eval_small(x)?
                } else {
                    d.eval_small(x)?
                }
            }
        })
    }

    /// Exact evaluation without clamping.
    pub fn eval_big(&self, x: &[u64]) -> BigUint {
        match self {
            Expr::Const(c) => BigUint::from(*c),
            Expr::Var(i) => BigUint::from(x[*i - 1]),
            Expr::Bin(op, l, r) => {
                let a = l.eval_big(x);
                let b = r.eval_big(x);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Monus => {
                        if a > b {
                            a - b
                        } else {
                            BigUint::zero()
                        }
                    }
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            BigUint::zero()
                        } else {
                            a.div_floor(&b)
                        }
                    }
                    BinOp::Mod => {
                        if b.is_zero() {
                            a
                        } else {
                            a.mod_floor(&b)
                        }
                    }
                }
            }
            Expr::Min(l, r) => l.eval_big(x).min(r.eval_big(x)),
            Expr::Max(l, r) => l.eval_big(x).max(r.eval_big(x)),
            Expr::Eq(a, b, c, d) => {
                if a.eval_big(x) == b.eval_big(x) {
                    c.eval_big(x)
                } else {
                    d.eval_big(x)
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.precedence(),
            _ => 3,
        }
    }
}

pub(crate) fn parse_expr(cur: &mut Cursor<'_>, depth: usize) -> Result<Expr, ParseError> {
    if depth > MAX_DEPTH {
        return Err(cur.error("expression nested too deeply"));
    }
    let mut lhs = parse_term(cur, depth + 1)?;
    let mut chain = depth + 1;
    loop {
        let op = if cur.eat("+") {
            BinOp::Add
        } else if cur.eat("-") {
            BinOp::Monus
        } else {
            return Ok(lhs);
        };
        chain += 1;
        if chain > MAX_DEPTH {
            return Err(cur.error("expression nested too deeply"));
        }
        let rhs = parse_term(cur, chain)?;
        lhs = Expr::bin(op, lhs, rhs);
    }
}

fn parse_term(cur: &mut Cursor<'_>, depth: usize) -> Result<Expr, ParseError> {
    let mut lhs = parse_atom(cur, depth + 1)?;
    let mut chain = depth + 1;
    loop {
        let op = if cur.eat("*") {
            BinOp::Mul
        } else if cur.eat("/") {
            BinOp::Div
        } else if cur.eat("%") {
            BinOp::Mod
        } else {
            return Ok(lhs);
        };
        chain += 1;
        if chain > MAX_DEPTH {
            return Err(cur.error("expression nested too deeply"));
        }
        let rhs = parse_atom(cur, chain)?;
        lhs = Expr::bin(op, lhs, rhs);
    }
}

fn parse_atom(cur: &mut Cursor<'_>, depth: usize) -> Result<Expr, ParseError> {
    cur.skip_ws();
    let start = cur.pos();
    match cur.peek() {
        Some(c) if c.is_ascii_digit() => Ok(Expr::Const(cur.nat()?)),
        Some('(') => {
            cur.bump();
            let e = parse_expr(cur, depth + 1)?;
            cur.expect(")")?;
            Ok(e)
        }
        Some(c) if c.is_ascii_alphabetic() => {
            let word = cur.ident().unwrap_or_default();
            match word {
                "min" | "max" => {
                    cur.expect("(")?;
                    let a = parse_expr(cur, depth + 1)?;
                    cur.expect(",")?;
                    let b = parse_expr(cur, depth + 1)?;
                    cur.expect(")")?;
                    Ok(if word == "min" {
                        Expr::Min(Box::new(a), Box::new(b))
                    } else {
                        Expr::Max(Box::new(a), Box::new(b))
                    })
                }
                "eq" => {
                    cur.expect("(")?;
                    let a = parse_expr(cur, depth + 1)?;
                    cur.expect(",")?;
                    let b = parse_expr(cur, depth + 1)?;
                    cur.expect(",")?;
                    let c = parse_expr(cur, depth + 1)?;
                    cur.expect(",")?;
                    let d = parse_expr(cur, depth + 1)?;
                    cur.expect(")")?;
                    Ok(Expr::Eq(Box::new(a), Box::new(b), Box::new(c), Box::new(d)))
                }
                "x" => Ok(Expr::Var(1)),
                "y" => Ok(Expr::Var(2)),
                "z" => Ok(Expr::Var(3)),
                w if w.len() > 1 && w.starts_with('x') && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                    match w[1..].parse::<usize>() {
                        Ok(i) if i >= 1 && i <= 64 => Ok(Expr::Var(i)),
                        _ => Err(ParseError::new(start, format!("variable `{w}` out of range x1..x64"))),
                    }
                }
                w => Err(ParseError::new(start, format!("unknown identifier `{w}`"))),
            }
        }
        Some(c) => Err(ParseError::new(start, format!("unexpected `{c}`"))),
        None => Err(ParseError::new(start, "unexpected end of input")),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                if l.precedence() < p {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if r.precedence() <= p {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Eq(a, b, c, d) => write!(f, "eq({a}, {b}, {c}, {d})"),
        }
    }
}
