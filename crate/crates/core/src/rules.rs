//! Local correctness rules, cell colours and the snake traversal.

use std::fmt;

use serde::Serialize;

use crate::config::NEIGHBOURHOOD;
use crate::error::{Error, Result};
use crate::formula::{CnfFormula, Polarity};
use crate::state::{CellState, Coord};

/// Identifier of a local correctness rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// Index consistency.
    A,
    /// Flag matches the formula.
    B,
    /// `a` is constant along a column.
    C1,
    /// Partial conjunction step in the last column.
    C2,
    /// Partial conjunction base case.
    C3,
    /// Partial disjunction step.
    D1,
    /// Partial disjunction base case.
    D2,
    E1,
    E2,
    E3,
    E4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Why a cell is red.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RedReason {
    Violates(Rule),
    /// Locally correct output cell whose `pc` is not 1.
    OutputZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Color {
    Blue,
    Red(RedReason),
}

impl Color {
    pub fn is_blue(self) -> bool {
        self == Color::Blue
    }

    pub fn is_red(self) -> bool {
        !self.is_blue()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Right,
    Left,
    Up,
    Down,
}

impl Direction {
    /// Offset `(di, dj)` of the cell this direction points to.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::Right => (0, 1),
            Direction::Left => (0, -1),
            Direction::Down => (1, 0),
            Direction::Up => (-1, 0),
        }
    }

    /// Position of the pointed-to neighbour in the von Neumann tuple.
    pub fn slot(self) -> usize {
        match self {
            Direction::Right => 1,
            Direction::Left => 2,
            Direction::Down => 3,
            Direction::Up => 4,
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Direction::Right => '→',
            Direction::Left => '←',
            Direction::Up => '↑',
            Direction::Down => '↓',
        }
    }
}

/// Direction `d_ij` of the traversal on an `(n+1) x (m+2)` table with `n` odd.
pub fn direction(n: usize, m: usize, i: usize, j: usize) -> Result<Direction> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenClauseCount(n));
    }
    if i > n || j > m + 1 {
        return Err(Error::IndexOutOfRange { i, j, n, m });
    }
    Ok(direction_unchecked(n, m, i, j))
}

#[inline]
pub(crate) fn direction_unchecked(n: usize, m: usize, i: usize, j: usize) -> Direction {
    let even = i.is_multiple_of(2);
    if (i, j) == (0, 0) || (even && (1..=m).contains(&j)) {
        Direction::Right
    } else if (i, j) == (n, 1) || (!even && (2..=m + 1).contains(&j)) {
        Direction::Left
    } else if (!even && j == 1) || (even && j == m + 1) {
        Direction::Down
    } else {
        debug_assert!(i >= 1 && j == 0);
        Direction::Up
    }
}

/// `suc(i, j)`: the coordinates one step along `d_ij`.
pub fn suc(n: usize, m: usize, i: usize, j: usize) -> Result<Coord> {
    let (di, dj) = direction(n, m, i, j)?.offset();
    Ok(Coord::new(i.wrapping_add_signed(di), j.wrapping_add_signed(dj)))
}

#[inline]
fn literal_true(s: &CellState) -> Option<bool> {
    match (s.flag?, s.a?) {
        (Polarity::Pos, a) => Some(a),
        (Polarity::Neg, a) => Some(!a),
        (Polarity::Absent, _) => Some(false),
    }
}

/// Checks the local correctness rules for the center of a von Neumann tuple
/// `(self, right, left, below, above)` and reports the first violated rule.
pub fn check_local(phi: &CnfFormula, nb: &[CellState; 5]) -> std::result::Result<(), Rule> {
    let (n, m) = (phi.n(), phi.m());
    let s = &nb[0];
    let Some(Coord { i, j }) = s.coord else { return Err(Rule::A) };
    if i > n || j > m + 1 {
        return Err(Rule::A);
    }

    // (A): every neighbour's written coordinates follow from ours; targets
    // outside the rectangle must be quiescent.
    for k in 1..5 {
        let (di, dj) = NEIGHBOURHOOD[k];
        let ti = i as isize + di;
        let tj = j as isize + dj;
        let inside = ti >= 0 && tj >= 0 && ti as usize <= n && tj as usize <= m + 1;
        let ok = if inside {
            nb[k].coord == Some(Coord::new(ti as usize, tj as usize))
        } else {
            nb[k].is_quiescent()
        };
        if !ok {
            return Err(Rule::A);
        }
    }

    let main_body = (1..=n).contains(&i) && (1..=m).contains(&j);
    let (left, below, above) = (&nb[2], &nb[3], &nb[4]);

    // (B)
    if main_body && s.flag != Some(phi.rel_at(i, j)) {
        return Err(Rule::B);
    }

    // (C1): quiescent vertical neighbours are exempt.
    if (1..=m).contains(&j) {
        for v in [below, above] {
            if !v.is_quiescent() && v.a != s.a {
                return Err(Rule::C1);
            }
        }
    }
    if j == m + 1 && i >= 2 {
        let ok = matches!((s.pc, above.pc, left.pd), (Some(pc), Some(up), Some(pd)) if pc == (up && pd));
        if !ok {
            return Err(Rule::C2);
        }
    }
    if j == m + 1 && i == 1 {
        let ok = matches!((s.pc, left.pd), (Some(pc), Some(pd)) if pc == pd);
        if !ok {
            return Err(Rule::C3);
        }
    }

    // (D)
    if main_body && j >= 2 {
        let ok = matches!((s.pd, left.pd, literal_true(s)), (Some(pd), Some(prev), Some(lit)) if pd == (prev || lit));
        if !ok {
            return Err(Rule::D1);
        }
    }
    if main_body && j == 1 {
        let ok = matches!((s.pd, literal_true(s)), (Some(pd), Some(lit)) if pd == lit);
        if !ok {
            return Err(Rule::D2);
        }
    }

    // (E): unused components are □ and used ones are present.
    let none4 = s.flag.is_none() && s.a.is_none() && s.pd.is_none() && s.pc.is_none();
    if j == 0 || (i, j) == (0, 0) || (i, j) == (0, m + 1) {
        if !none4 {
            return Err(Rule::E1);
        }
    } else if i == 0 {
        if s.flag.is_some() || s.pd.is_some() || s.pc.is_some() || s.a.is_none() {
            return Err(Rule::E2);
        }
    } else if j == m + 1 {
        if s.flag.is_some() || s.a.is_some() || s.pd.is_some() || s.pc.is_none() {
            return Err(Rule::E3);
        }
    } else if s.pc.is_some() || s.flag.is_none() || s.a.is_none() || s.pd.is_none() {
        return Err(Rule::E4);
    }
    Ok(())
}

/// Colour of the center of a von Neumann tuple.
pub fn color_of(phi: &CnfFormula, nb: &[CellState; 5]) -> Color {
    if let Err(rule) = check_local(phi, nb) {
        return Color::Red(RedReason::Violates(rule));
    }
    let output = Coord::new(phi.n(), phi.m() + 1);
    if nb[0].coord == Some(output) && nb[0].pc != Some(true) {
        return Color::Red(RedReason::OutputZero);
    }
    Color::Blue
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_match_six_by_five_layout() {
        // rows of the 6x5 arrow table for n = 5, m = 3
        let expected = [
            "→→→→↓", "↑↓←←←", "↑→→→↓", "↑↓←←←", "↑→→→↓", "↑←←←←",
        ];
        for (i, row) in expected.iter().enumerate() {
            let got: String = (0..5).map(|j| direction(5, 3, i, j).unwrap().arrow()).collect();
            assert_eq!(&got, row, "row {i}");
        }
        assert_eq!(direction(5, 3, 2, 4).unwrap(), Direction::Down);
        assert!(matches!(direction(4, 3, 0, 0), Err(Error::EvenClauseCount(4))));
    }

    #[test]
    fn successors() {
        assert_eq!(suc(5, 3, 0, 0).unwrap(), Coord::new(0, 1));
        assert_eq!(suc(5, 3, 5, 1).unwrap(), Coord::new(5, 0));
        assert_eq!(suc(5, 3, 1, 0).unwrap(), Coord::new(0, 0));
    }

    /// Following `suc` from (0,0) visits every cell once and returns.
    #[test]
    fn traversal_is_one_hamiltonian_cycle() {
        for n in (1..=9).step_by(2) {
            for m in 1..=5 {
                let total = (n + 1) * (m + 2);
                let mut seen = vec![false; total];
                let mut c = Coord::new(0, 0);
                for _ in 0..total {
                    assert!(c.i <= n && c.j <= m + 1);
                    let k = c.i * (m + 2) + c.j;
                    assert!(!seen[k], "revisited {c} for n={n} m={m}");
                    seen[k] = true;
                    c = suc(n, m, c.i, c.j).unwrap();
                }
                assert_eq!(c, Coord::new(0, 0));
                assert!(seen.iter().all(|&s| s));
            }
        }
    }
}
