//! The automaton `A_phi`: transition function, colours, successors and one
//! synchronous step on bounded configurations.

use std::sync::Arc;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::formula::CnfFormula;
use crate::rules::{self, check_local, color_of, direction_unchecked, Color, Rule};
use crate::state::{CellState, Coord, StateSet};

/// `A_phi` for a formula normalized to an odd number of clauses.
#[derive(Clone, Debug)]
pub struct FormulaAutomaton {
    phi: CnfFormula,
    states: Arc<StateSet>,
}

impl FormulaAutomaton {
    /// Builds `A_phi`, first appending a copy of the last clause if the
    /// clause count is even.
    pub fn new(phi: &CnfFormula) -> Self {
        let phi = phi.normalize_odd();
        let states = StateSet::enumerate(phi.n(), phi.m()).expect("normalized formula has odd n");
        FormulaAutomaton { phi, states: Arc::new(states) }
    }

    /// The normalized formula.
    pub fn formula(&self) -> &CnfFormula {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn m(&self) -> usize {
        self.phi.m()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.phi.n(), self.phi.m())
    }

    /// Number of cells in the rectangle.
    pub fn cells(&self) -> usize {
        (self.n() + 1) * (self.m() + 2)
    }

    pub fn states(&self) -> &Arc<StateSet> {
        &self.states
    }

    pub fn check_dims(&self, c: &Configuration) -> Result<()> {
        if c.dims() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: c.dims() });
        }
        Ok(())
    }

    /// Colour of the center of a von Neumann tuple.
    pub fn color_of_tuple(&self, nb: &[CellState; 5]) -> Color {
        color_of(&self.phi, nb)
    }

    /// The local transition function `f_phi`. A blue center XORs its label
    /// with its successor's; anything else, including the quiescent state,
    /// is returned unchanged.
    pub fn transition(&self, nb: &[CellState; 5]) -> CellState {
        let center = nb[0];
        if center.is_quiescent() || !color_of(&self.phi, nb).is_blue() {
            return center;
        }
        let c = center.coord.expect("blue cells carry coordinates");
        let slot = direction_unchecked(self.n(), self.m(), c.i, c.j).slot();
        let label = center.label.unwrap_or(false) ^ nb[slot].label.unwrap_or(false);
        center.with_label(label)
    }

    /// First violated rule at `pos`, if any.
    pub fn is_locally_correct(&self, c: &Configuration, pos: Coord) -> std::result::Result<(), Rule> {
        check_local(&self.phi, &c.neighbourhood(pos))
    }

    pub fn color(&self, c: &Configuration, pos: Coord) -> Color {
        color_of(&self.phi, &c.neighbourhood(pos))
    }

    /// Colours of all cells, row-major.
    pub fn colors(&self, c: &Configuration) -> Vec<Color> {
        c.positions().map(|p| self.color(c, p)).collect()
    }

    /// The unique neighbour of a blue cell whose written coordinates equal
    /// `suc` of the cell's written coordinates.
    pub fn successor_of(&self, c: &Configuration, pos: Coord) -> Result<Coord> {
        if self.color(c, pos).is_red() {
            return Err(Error::RedCell((pos.i, pos.j)));
        }
        let w = c.at(pos).coord.expect("blue cells carry coordinates");
        let target = rules::suc(self.n(), self.m(), w.i, w.j)?;
        let (i, j) = (pos.i as isize, pos.j as isize);
        let mut found = crate::config::NEIGHBOURHOOD[1..]
            .iter()
            .map(|&(di, dj)| (i + di, j + dj))
            .filter(|&(a, b)| c.contains(a, b) && c.get(a, b).coord == Some(target));
        let first = found.next();
        match (first, found.next()) {
            (Some((a, b)), None) => Ok(Coord::new(a as usize, b as usize)),
            (None, _) => Err(Error::Invariant(format!("blue cell {pos} has no successor"))),
            _ => Err(Error::Invariant(format!("blue cell {pos} has several successors"))),
        }
    }

    /// Row-major successor index of every blue cell; `None` for red cells.
    pub fn successors(&self, c: &Configuration) -> Vec<Option<usize>> {
        c.positions()
            .map(|p| {
                let nb = c.neighbourhood(p);
                if !color_of(&self.phi, &nb).is_blue() {
                    return None;
                }
                let w = nb[0].coord.expect("blue cells carry coordinates");
                let (di, dj) = direction_unchecked(self.n(), self.m(), w.i, w.j).offset();
                let s = p.offset(di, dj).expect("successor stays inside the rectangle");
                Some(c.flat(s))
            })
            .collect()
    }

    /// One synchronous application of `A_phi`.
    pub fn step(&self, c: &Configuration) -> Result<Configuration> {
        self.check_dims(c)?;
        let cells = c.positions().map(|p| self.transition(&c.neighbourhood(p))).collect();
        Ok(Configuration::from_cells_unchecked(self.n(), self.m(), cells))
    }
}
