//! Compile CNF formulas into two-dimensional cellular automata whose
//! injectivity on bounded configurations is equivalent to
//! unsatisfiability, and check inverse automata as refutations.

pub mod analysis;
pub mod automaton;
pub mod bits;
pub mod config;
pub mod error;
pub mod formula;
pub mod inverse;
pub mod rules;
pub mod state;
pub mod table;
pub mod tableau;
pub mod translate;

pub use automaton::FormulaAutomaton;
pub use bits::BitString;
pub use config::Configuration;
pub use error::{Error, Result};
pub use formula::{gen_onto_php, gen_weak_php, parse_dimacs, Assignment, CnfFormula, Polarity};
pub use rules::{Color, Direction, RedReason, Rule};
pub use state::{CellState, Coord, StateSet};
pub use table::CaTable;
pub use tableau::{build_table, similar, witness_pair};
