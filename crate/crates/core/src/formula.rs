//! CNF formulas in relational form.
//!
//! A formula with `n` clauses over `m` variables is stored as a total map
//! `rel : {1..n} x {1..m} -> {-1, 0, 1}`: `rel(i, j) = 1` when `x_j` occurs in
//! clause `i`, `-1` when `¬x_j` occurs, and `0` otherwise. A clause holding
//! both polarities of a variable cannot be represented and is rejected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Occurrence of a variable in a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Neg,
    Absent,
    Pos,
}

impl Polarity {
    pub fn as_i8(self) -> i8 {
        match self {
            Polarity::Neg => -1,
            Polarity::Absent => 0,
            Polarity::Pos => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Polarity::Neg),
            0 => Some(Polarity::Absent),
            1 => Some(Polarity::Pos),
            _ => None,
        }
    }

    /// Truth value of the literal this polarity denotes under `value`.
    /// `Absent` stands for the constant false.
    pub fn eval(self, value: bool) -> bool {
        match self {
            Polarity::Pos => value,
            Polarity::Neg => !value,
            Polarity::Absent => false,
        }
    }
}

/// A CNF formula with `n >= 1` clauses and `m >= 1` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    n: usize,
    m: usize,
    rel: Vec<Polarity>,
}

impl CnfFormula {
    /// Builds a formula from clauses given as DIMACS-style literals
    /// (`j` for `x_j`, `-j` for `¬x_j`, 1-based).
    pub fn from_clauses(m: usize, clauses: &[Vec<i64>]) -> Result<Self> {
        if m == 0 || clauses.is_empty() {
            return Err(Error::EmptyFormula);
        }
        let n = clauses.len();
        let mut rel = vec![Polarity::Absent; n * m];
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::EmptyClause(ci + 1));
            }
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > m {
                    return Err(Error::IndexOutOfRange { i: ci + 1, j: var, n, m });
                }
                let p = if lit > 0 { Polarity::Pos } else { Polarity::Neg };
                let slot = &mut rel[ci * m + var - 1];
                match *slot {
                    Polarity::Absent => *slot = p,
                    existing if existing == p => {}
                    _ => return Err(Error::ComplementaryLiterals { clause: ci + 1, var }),
                }
            }
        }
        Ok(CnfFormula { n, m, rel })
    }

    /// Builds a formula directly from a row-major `n x m` relation.
    pub fn from_rel(n: usize, m: usize, rel: Vec<Polarity>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyFormula);
        }
        if rel.len() != n * m {
            return Err(Error::Invariant(format!(
                "relation has {} entries, expected {}",
                rel.len(),
                n * m
            )));
        }
        for i in 0..n {
            if rel[i * m..(i + 1) * m].iter().all(|&p| p == Polarity::Absent) {
                return Err(Error::EmptyClause(i + 1));
            }
        }
        Ok(CnfFormula { n, m, rel })
    }

    /// Number of clauses.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of variables.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `rel(i, j)` with 1-based indices.
    pub fn rel(&self, i: usize, j: usize) -> Result<Polarity> {
        self.check_index(i, j)?;
        Ok(self.rel[(i - 1) * self.m + (j - 1)])
    }

    /// Unchecked variant of [`rel`](Self::rel) used on hot paths; panics on
    /// out-of-range indices.
    #[inline]
    pub(crate) fn rel_at(&self, i: usize, j: usize) -> Polarity {
        self.rel[(i - 1) * self.m + (j - 1)]
    }

    /// The restriction `C_{i,j}` of clause `i` to variable `j`.
    pub fn clause_restriction(&self, i: usize, j: usize) -> Result<Polarity> {
        self.rel(i, j)
    }

    /// Clause `i` as DIMACS literals in increasing variable order.
    pub fn clause(&self, i: usize) -> Vec<i64> {
        (1..=self.m)
            .filter_map(|j| match self.rel_at(i, j) {
                Polarity::Pos => Some(j as i64),
                Polarity::Neg => Some(-(j as i64)),
                Polarity::Absent => None,
            })
            .collect()
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || i > self.n || j == 0 || j > self.m {
            return Err(Error::IndexOutOfRange { i, j, n: self.n, m: self.m });
        }
        Ok(())
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.m {
            return Err(Error::AssignmentLength { expected: self.m, got: a.len() });
        }
        Ok(())
    }

    fn clause_value(&self, i: usize, a: &Assignment) -> bool {
        (1..=self.m).any(|j| self.rel_at(i, j).eval(a.get(j)))
    }

    /// Whether `a` satisfies every clause.
    pub fn is_satisfied(&self, a: &Assignment) -> Result<bool> {
        self.check_assignment(a)?;
        Ok((1..=self.n).all(|i| self.clause_value(i, a)))
    }

    /// `(C_{i,1} ∨ ... ∨ C_{i,j})(a)`.
    pub fn partial_disjunction(&self, a: &Assignment, i: usize, j: usize) -> Result<bool> {
        self.check_index(i, j)?;
        self.check_assignment(a)?;
        Ok((1..=j).any(|u| self.rel_at(i, u).eval(a.get(u))))
    }

    /// `(C_1 ∧ ... ∧ C_i)(a)`.
    pub fn partial_conjunction(&self, a: &Assignment, i: usize) -> Result<bool> {
        self.check_index(i, 1)?;
        self.check_assignment(a)?;
        Ok((1..=i).all(|v| self.clause_value(v, a)))
    }

    /// Appends a copy of the last clause when the clause count is even.
    pub fn normalize_odd(&self) -> CnfFormula {
        if self.n % 2 == 1 {
            return self.clone();
        }
        let mut rel = self.rel.clone();
        rel.extend_from_slice(&self.rel[(self.n - 1) * self.m..]);
        CnfFormula { n: self.n + 1, m: self.m, rel }
    }

    /// All `2^m` assignments in lexicographic order, `a_1` most significant.
    pub fn assignments(&self) -> Assignments {
        Assignments::new(self.m)
    }

    /// First satisfying assignment in lexicographic order, by exhaustive scan.
    pub fn first_satisfying(&self) -> Option<Assignment> {
        self.assignments().find(|a| (1..=self.n).all(|i| self.clause_value(i, a)))
    }

    /// DIMACS text with clauses in order and literals by increasing variable.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.m, self.n);
        for i in 1..=self.n {
            for lit in self.clause(i) {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Canonical dump: a `rel n m` header then one `i j s` line per entry.
    pub fn rel_dump(&self) -> String {
        let mut out = format!("rel {} {}\n", self.n, self.m);
        for i in 1..=self.n {
            for j in 1..=self.m {
                out.push_str(&format!("{} {} {}\n", i, j, self.rel_at(i, j).as_i8()));
            }
        }
        out
    }

    /// Inverse of [`rel_dump`](Self::rel_dump).
    pub fn parse_rel_dump(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Dimacs { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "rel" {
            return Err(bad(hl + 1, "expected `rel n m`"));
        }
        let n: usize = h[1].parse().map_err(|_| bad(hl + 1, "bad n"))?;
        let m: usize = h[2].parse().map_err(|_| bad(hl + 1, "bad m"))?;
        let mut rel = vec![None; n * m];
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let parsed = (f.len() == 3)
                .then(|| (f[0].parse::<usize>(), f[1].parse::<usize>(), f[2].parse::<i8>()));
            let (i, j, s) = match parsed {
                Some((Ok(i), Ok(j), Ok(s))) => (i, j, s),
                _ => return Err(bad(ln + 1, "expected `i j s`")),
            };
            if i == 0 || i > n || j == 0 || j > m {
                return Err(Error::IndexOutOfRange { i, j, n, m });
            }
            let p = Polarity::from_i8(s).ok_or_else(|| bad(ln + 1, "s must be -1, 0 or 1"))?;
            let slot = &mut rel[(i - 1) * m + (j - 1)];
            if slot.is_some() {
                return Err(bad(ln + 1, "duplicate entry"));
            }
            *slot = Some(p);
        }
        let rel: Option<Vec<Polarity>> = rel.into_iter().collect();
        let rel = rel.ok_or_else(|| bad(0, "relation is not total"))?;
        CnfFormula::from_rel(n, m, rel)
    }
}

impl FromStr for CnfFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_dimacs(s)
    }
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines
/// and end with `0`; a `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Dimacs { line: line_no, msg: "duplicate header".into() });
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(Error::Dimacs {
                    line: line_no,
                    msg: "expected `p cnf <vars> <clauses>`".into(),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Dimacs {
                    line: line_no,
                    msg: format!("invalid count `{s}`"),
                })
            };
            header = Some((parse(f[2])?, parse(f[3])?));
            continue;
        }
        let (vars, nclauses) = header.ok_or_else(|| Error::Dimacs {
            line: line_no,
            msg: "clause before header".into(),
        })?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Dimacs {
                line: line_no,
                msg: format!("invalid literal `{tok}`"),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::EmptyClause(clauses.len() + 1));
                }
                if clauses.len() == nclauses {
                    return Err(Error::Dimacs {
                        line: line_no,
                        msg: format!("more than the declared {nclauses} clauses"),
                    });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(Error::Dimacs {
                        line: line_no,
                        msg: format!("literal {lit} exceeds the declared {vars} variables"),
                    });
                }
                current.push(lit);
            }
        }
    }
    let (vars, nclauses) = header.ok_or(Error::Dimacs { line: last_line, msg: "missing header".into() })?;
    if !current.is_empty() {
        return Err(Error::Dimacs { line: last_line, msg: "unterminated clause".into() });
    }
    if clauses.len() != nclauses {
        return Err(Error::Dimacs {
            line: last_line,
            msg: format!("header declares {nclauses} clauses, found {}", clauses.len()),
        });
    }
    CnfFormula::from_clauses(vars, &clauses)
}

/// A 0/1 assignment `a_1..a_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `a_j`, 1-based.
    pub fn get(&self, j: usize) -> bool {
        self.0[j - 1]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    /// Accepts `011`, `0,1,1` or `0 1 1`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Syntax { pos: 0, msg: format!("invalid assignment bit `{c}`") }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment(values))
    }
}

/// Lexicographic enumeration of `{0,1}^m`.
pub struct Assignments {
    m: usize,
    next: u64,
    end: u64,
}

impl Assignments {
    fn new(m: usize) -> Self {
        assert!(m < 64, "too many variables to enumerate");
        Assignments { m, next: 0, end: 1u64 << m }
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.next >= self.end {
            return None;
        }
        let x = self.next;
        self.next += 1;
        Some(Assignment((0..self.m).map(|j| (x >> (self.m - 1 - j)) & 1 == 1).collect()))
    }
}

/// Variable index of `p_{ij}` (pigeon `i ∈ [k+1]`, hole `j ∈ [k]`): `i*k + j + 1`.
pub fn php_var(k: usize, pigeon: usize, hole: usize) -> i64 {
    (pigeon * k + hole + 1) as i64
}

fn php_clauses(k: usize, onto: bool) -> Vec<Vec<i64>> {
    let p = |i, j| php_var(k, i, j);
    let mut clauses = Vec::new();
    // every pigeon sits in some hole
    for i in 0..=k {
        clauses.push((0..k).map(|j| p(i, j)).collect());
    }
    // no two pigeons share a hole
    for i1 in 0..=k {
        for i2 in i1 + 1..=k {
            for j in 0..k {
                clauses.push(vec![-p(i1, j), -p(i2, j)]);
            }
        }
    }
    if onto {
        // no pigeon in two holes
        for i in 0..=k {
            for j1 in 0..k {
                for j2 in j1 + 1..k {
                    clauses.push(vec![-p(i, j1), -p(i, j2)]);
                }
            }
        }
        // every hole is occupied
        for j in 0..k {
            clauses.push((0..=k).map(|i| p(i, j)).collect());
        }
    }
    clauses
}

/// The onto pigeonhole CNF with `k + 1` pigeons and `k` holes.
pub fn gen_onto_php(k: usize) -> CnfFormula {
    assert!(k >= 1, "pigeonhole formulas need at least one hole");
    CnfFormula::from_clauses(k * (k + 1), &php_clauses(k, true)).expect("valid PHP formula")
}

/// The weak pigeonhole CNF: totality and injectivity clauses only.
pub fn gen_weak_php(k: usize) -> CnfFormula {
    assert!(k >= 1, "pigeonhole formulas need at least one hole");
    CnfFormula::from_clauses(k * (k + 1), &php_clauses(k, false)).expect("valid PHP formula")
}
