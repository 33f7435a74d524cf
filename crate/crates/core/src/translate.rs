//! Bounded arithmetic formulas over one binary relation `R`, their
//! Paris–Wilkie propositional translation, formula depth and the pairing
//! function.
//!
//! Formulas use an S-expression syntax:
//!
//! ```text
//! formula := (= t t) | (<= t t) | (R t t) | (not f) | (and f+) | (or f+)
//!          | (exists y t f) | (forall y t f)
//! term    := number | ident | (+ t t) | (* t t)
//! ```
//!
//! Quantifiers are bounded: `(exists y t f)` reads `∃y ≤ t f`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Cantor pairing `<x, y> = (x+y)(x+y+1)/2 + x`; exact while `x + y < 2^64`.
pub fn pairing(x: u64, y: u64) -> u128 {
    let s = x as u128 + y as u128;
    let tri = if s.is_multiple_of(2) { (s / 2) * (s + 1) } else { s * s.div_ceil(2) };
    tri + x as u128
}

/// Inverse of [`pairing`].
pub fn unpair(z: u128) -> (u128, u128) {
    let tri = |w: u128| if w.is_multiple_of(2) { (w / 2) * (w + 1) } else { w * w.div_ceil(2) };
    let mut w = (z.saturating_mul(2)).isqrt();
    while tri(w) > z {
        w -= 1;
    }
    while tri(w + 1) <= z {
        w += 1;
    }
    let x = z - tri(w);
    (x, w - x)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArithTerm {
    Num(u64),
    Var(String),
    Add(Box<ArithTerm>, Box<ArithTerm>),
    Mul(Box<ArithTerm>, Box<ArithTerm>),
}

pub type Env = HashMap<String, u64>;

pub fn eval_term(t: &ArithTerm, env: &Env) -> Result<u64> {
    Ok(match t {
        ArithTerm::Num(n) => *n,
        ArithTerm::Var(v) => *env.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        ArithTerm::Add(a, b) => eval_term(a, env)?.checked_add(eval_term(b, env)?).ok_or(Error::ArithmeticOverflow)?,
        ArithTerm::Mul(a, b) => eval_term(a, env)?.checked_mul(eval_term(b, env)?).ok_or(Error::ArithmeticOverflow)?,
    })
}

impl fmt::Display for ArithTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithTerm::Num(n) => write!(f, "{n}"),
            ArithTerm::Var(v) => f.write_str(v),
            ArithTerm::Add(a, b) => write!(f, "(+ {a} {b})"),
            ArithTerm::Mul(a, b) => write!(f, "(* {a} {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Delta0 {
    Eq(ArithTerm, ArithTerm),
    Le(ArithTerm, ArithTerm),
    Rel(ArithTerm, ArithTerm),
    Not(Box<Delta0>),
    And(Vec<Delta0>),
    Or(Vec<Delta0>),
    Exists { var: String, bound: ArithTerm, body: Box<Delta0> },
    Forall { var: String, bound: ArithTerm, body: Box<Delta0> },
}

impl fmt::Display for Delta0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, xs: &[Delta0]| {
            write!(f, "({op}")?;
            for x in xs {
                write!(f, " {x}")?;
            }
            f.write_str(")")
        };
        match self {
            Delta0::Eq(a, b) => write!(f, "(= {a} {b})"),
            Delta0::Le(a, b) => write!(f, "(<= {a} {b})"),
            Delta0::Rel(a, b) => write!(f, "(R {a} {b})"),
            Delta0::Not(a) => write!(f, "(not {a})"),
            Delta0::And(xs) => list(f, "and", xs),
            Delta0::Or(xs) => list(f, "or", xs),
            Delta0::Exists { var, bound, body } => write!(f, "(exists {var} {bound} {body})"),
            Delta0::Forall { var, bound, body } => write!(f, "(forall {var} {bound} {body})"),
        }
    }
}

/// Propositional formulas in the DeMorgan language. Variables are stored by
/// their pairing index and printed as `r_{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Const(bool),
    Var(u128),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
}

impl PropFormula {
    pub fn var(i: u64, j: u64) -> Self {
        PropFormula::Var(pairing(i, j))
    }

    /// Depth: alternations of maximal same-connective blocks, with stacked
    /// negations counted once.
    pub fn depth(&self) -> usize {
        match self {
            PropFormula::Const(_) | PropFormula::Var(_) => 0,
            PropFormula::Not(b) if matches!(**b, PropFormula::Not(_)) => b.depth(),
            PropFormula::Not(b) => 1 + b.depth(),
            PropFormula::And(_) | PropFormula::Or(_) => {
                let mut leaves = Vec::new();
                self.block_leaves(self.is_or(), &mut leaves);
                1 + leaves.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
        }
    }

    fn is_or(&self) -> bool {
        matches!(self, PropFormula::Or(_))
    }

    fn block_leaves<'a>(&'a self, or: bool, out: &mut Vec<&'a PropFormula>) {
        match self {
            PropFormula::Or(xs) if or => xs.iter().for_each(|x| x.block_leaves(or, out)),
            PropFormula::And(xs) if !or => xs.iter().for_each(|x| x.block_leaves(or, out)),
            _ => out.push(self),
        }
    }

    /// Number of symbols: leaves, negations and `k - 1` connectives for each
    /// `k`-ary conjunction or disjunction.
    pub fn size(&self) -> usize {
        match self {
            PropFormula::Const(_) | PropFormula::Var(_) => 1,
            PropFormula::Not(b) => 1 + b.size(),
            PropFormula::And(xs) | PropFormula::Or(xs) => {
                xs.iter().map(PropFormula::size).sum::<usize>() + xs.len().saturating_sub(1)
            }
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, xs: &[PropFormula]| {
            f.write_str("(")?;
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            PropFormula::Const(b) => write!(f, "{}", *b as u8),
            PropFormula::Var(z) => {
                let (i, j) = unpair(*z);
                write!(f, "r_{{{i},{j}}}")
            }
            PropFormula::Not(b) => write!(f, "¬{b}"),
            PropFormula::And(xs) => list(f, "∧", xs),
            PropFormula::Or(xs) => list(f, "∨", xs),
        }
    }
}

/// `<A>_env`: closed atoms become constants, `R(t, s)` becomes `r_{t,s}`,
/// and bounded quantifiers expand into disjunctions and conjunctions.
pub fn pw_translate(a: &Delta0, env: &Env) -> Result<PropFormula> {
    let mut env = env.clone();
    translate_in(a, &mut env)
}

fn translate_in(a: &Delta0, env: &mut Env) -> Result<PropFormula> {
    Ok(match a {
        Delta0::Eq(x, y) => PropFormula::Const(eval_term(x, env)? == eval_term(y, env)?),
        Delta0::Le(x, y) => PropFormula::Const(eval_term(x, env)? <= eval_term(y, env)?),
        Delta0::Rel(x, y) => PropFormula::var(eval_term(x, env)?, eval_term(y, env)?),
        Delta0::Not(b) => PropFormula::Not(Box::new(translate_in(b, env)?)),
        Delta0::And(xs) => PropFormula::And(xs.iter().map(|x| translate_in(x, env)).collect::<Result<_>>()?),
        Delta0::Or(xs) => PropFormula::Or(xs.iter().map(|x| translate_in(x, env)).collect::<Result<_>>()?),
        Delta0::Exists { var, bound, body } => PropFormula::Or(expand(var, bound, body, env)?),
        Delta0::Forall { var, bound, body } => PropFormula::And(expand(var, bound, body, env)?),
    })
}

fn expand(var: &str, bound: &ArithTerm, body: &Delta0, env: &mut Env) -> Result<Vec<PropFormula>> {
    let t = eval_term(bound, env)?;
    let saved = env.get(var).copied();
    let mut out = Vec::with_capacity(t as usize + 1);
    for v in 0..=t {
        env.insert(var.to_string(), v);
        out.push(translate_in(body, env)?);
    }
    match saved {
        Some(v) => env.insert(var.to_string(), v),
        None => env.remove(var),
    };
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub size: usize,
    pub depth: usize,
}

/// Size and depth of `<A>` with `var` set to each value in `range`.
pub fn size_depth_scan(a: &Delta0, var: &str, range: impl IntoIterator<Item = u64>) -> Result<Vec<ScanRow>> {
    range
        .into_iter()
        .map(|n| {
            let env = Env::from([(var.to_string(), n)]);
            let p = pw_translate(a, &env)?;
            Ok(ScanRow { n, size: p.size(), depth: p.depth() })
        })
        .collect()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn atom(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| c.is_whitespace() || c == '(' || c == ')').unwrap_or(rest.len());
        if len == 0 {
            return self.err("expected a symbol");
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        let a = self.atom()?;
        let ok = a.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
            && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            self.pos = start;
            return self.err(format!("invalid variable name `{a}`"));
        }
        Ok(a.to_string())
    }

    fn term(&mut self) -> Result<ArithTerm> {
        if self.peek() == Some('(') {
            self.expect('(')?;
            let start = self.pos;
            let op = self.atom()?;
            let (a, b) = (self.term()?, self.term()?);
            self.expect(')')?;
            return match op {
                "+" => Ok(ArithTerm::Add(Box::new(a), Box::new(b))),
                "*" => Ok(ArithTerm::Mul(Box::new(a), Box::new(b))),
                _ => {
                    self.pos = start;
                    self.err(format!("unknown term operator `{op}`"))
                }
            };
        }
        let start = self.pos;
        let a = self.atom()?;
        if a.starts_with(|c: char| c.is_ascii_digit()) {
            return a.parse().map(ArithTerm::Num).or_else(|_| {
                self.pos = start;
                self.err(format!("invalid number `{a}`"))
            });
        }
        self.pos = start;
        self.ident().map(ArithTerm::Var)
    }

    fn formula(&mut self) -> Result<Delta0> {
        self.expect('(')?;
        let start = self.pos;
        let head = self.atom()?;
        let f = match head {
            "=" => Delta0::Eq(self.term()?, self.term()?),
            "<=" => Delta0::Le(self.term()?, self.term()?),
            "R" => Delta0::Rel(self.term()?, self.term()?),
            "not" => Delta0::Not(Box::new(self.formula()?)),
            "and" | "or" => {
                let mut xs = vec![self.formula()?];
                while self.peek() == Some('(') {
                    xs.push(self.formula()?);
                }
                if head == "and" {
                    Delta0::And(xs)
                } else {
                    Delta0::Or(xs)
                }
            }
            "exists" | "forall" => {
                let var = self.ident()?;
                let bound = self.term()?;
                let body = Box::new(self.formula()?);
                if head == "exists" {
                    Delta0::Exists { var, bound, body }
                } else {
                    Delta0::Forall { var, bound, body }
                }
            }
            _ => {
                self.pos = start;
                return self.err(format!("unknown connective `{head}`"));
            }
        };
        self.expect(')')?;
        Ok(f)
    }
}

impl FromStr for Delta0 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let f = p.formula()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(f)
    }
}

impl FromStr for ArithTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let t = p.term()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(t)
    }
}
