//! Computation tables `Table_phi(a)`, similarity and collision witnesses.

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::formula::{Assignment, CnfFormula};
use crate::state::{CellState, Coord};

/// The canonical computation table of `phi` on `a`, all labels 0.
///
/// Row 0 carries the assignment, the main body carries clause flags and
/// partial disjunctions, and the last column carries partial conjunctions.
pub fn build_table(phi: &CnfFormula, a: &Assignment) -> Result<Configuration> {
    let (n, m) = (phi.n(), phi.m());
    if a.len() != m {
        return Err(Error::AssignmentLength { expected: m, got: a.len() });
    }
    let mut cells = Vec::with_capacity((n + 1) * (m + 2));
    for i in 0..=n {
        for j in 0..=m + 1 {
            let base = CellState::bare(Coord::new(i, j), false);
            let s = match (i, j) {
                (_, 0) => base,
                (0, j) if j <= m => CellState { a: Some(a.get(j)), ..base },
                (0, _) => base,
                (i, j) if j == m + 1 => CellState { pc: Some(phi.partial_conjunction(a, i)?), ..base },
                (i, j) => CellState {
                    flag: Some(phi.rel(i, j)?),
                    a: Some(a.get(j)),
                    pd: Some(phi.partial_disjunction(a, i, j)?),
                    ..base
                },
            };
            cells.push(s);
        }
    }
    Configuration::new(n, m, cells)
}

/// Equality up to labels.
pub fn similar(c1: &Configuration, c2: &Configuration) -> Result<bool> {
    c1.similar(c2)
}

/// `(Table_phi(a), all-ones variant)` for the normalized formula: two
/// distinct configurations with the same image.
pub fn witness_pair(phi: &CnfFormula, a: &Assignment) -> Result<(Configuration, Configuration)> {
    let phi = phi.normalize_odd();
    if !phi.is_satisfied(a)? {
        return Err(Error::NotSatisfying(a.to_string()));
    }
    let t = build_table(&phi, a)?;
    let ones = t.with_labels(std::iter::repeat_n(true, t.len()));
    Ok((t, ones))
}
