//! Explicit transition tables of `A_phi` and their bit encoding.
//!
//! Rows are indexed by 5-tuples of canonical state indices in neighbourhood
//! order (self, right, left, below, above), read as a base-`s` number with
//! the center most significant. The encoding is the sequence of row outputs,
//! each a `⌈log2 s⌉`-bit big-endian state index, with no header.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::automaton::FormulaAutomaton;
use crate::bits::BitString;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::state::StateSet;

/// Default cap on the number of rows `materialize` will build.
pub const DEFAULT_ROW_BUDGET: u64 = 1 << 28;

const MAGIC: &[u8; 4] = b"CATB";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaTable {
    states: Arc<StateSet>,
    rows: Vec<u16>,
}

/// `s^5`, or `None` on overflow.
pub fn row_count(s: usize) -> Option<u64> {
    (s as u64).checked_pow(5)
}

/// Encoded length in bits, `s^5 * ⌈log2 s⌉`.
pub fn encoded_len(states: &StateSet) -> Option<u64> {
    row_count(states.len())?.checked_mul(states.width() as u64)
}

impl CaTable {
    /// Evaluates `f_phi` on every 5-tuple of states.
    pub fn materialize(aut: &FormulaAutomaton, row_budget: u64) -> Result<CaTable> {
        let states = aut.states().clone();
        let s = states.len();
        let rows_needed = row_count(s).filter(|&r| r <= row_budget).ok_or_else(|| {
            Error::BudgetExceeded {
                what: "transition table rows",
                needed: format!("{s}^5"),
                budget: row_budget.to_string(),
            }
        })?;
        if s > u16::MAX as usize {
            return Err(Error::BudgetExceeded {
                what: "state count",
                needed: s.to_string(),
                budget: u16::MAX.to_string(),
            });
        }
        let q = states.quiescent_index();
        let st = states.states();
        let mut rows = Vec::with_capacity(rows_needed as usize);
        let s4 = s.pow(4);
        // f only ever flips the center's label
        let flipped: Vec<u16> = st
            .iter()
            .map(|x| match x.label {
                Some(l) => states.index_of(&x.with_label(!l)).expect("label flip stays in S") as u16,
                None => q as u16,
            })
            .collect();
        for c in 0..s {
            if c as u32 == q {
                rows.extend(std::iter::repeat_n(q as u16, s4));
                continue;
            }
            let mut nb = [st[c]; 5];
            for &r in st {
                nb[1] = r;
                for &l in st {
                    nb[2] = l;
                    for &b in st {
                        nb[3] = b;
                        for &a in st {
                            nb[4] = a;
                            let out = aut.transition(&nb);
                            rows.push(if out == nb[0] { c as u16 } else { flipped[c] });
                        }
                    }
                }
            }
        }
        Ok(CaTable { states, rows })
    }

    pub fn states(&self) -> &Arc<StateSet> {
        &self.states
    }

    pub fn row_count(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn row_index(&self, idx: [u32; 5]) -> usize {
        let s = self.states.len();
        idx.iter().fold(0usize, |acc, &x| acc * s + x as usize)
    }

    /// Output state index for a neighbourhood of state indices.
    pub fn output(&self, idx: [u32; 5]) -> u32 {
        self.rows[self.row_index(idx)] as u32
    }

    /// Overwrites one row; used to build corrupted tables in tests.
    pub fn set_row(&mut self, row: usize, out: u32) {
        assert!((out as usize) < self.states.len());
        self.rows[row] = out as u16;
    }

    pub fn encode(&self) -> BitString {
        let w = self.states.width();
        let mut bits = BitString::with_capacity(self.rows.len() as u64 * w as u64);
        for &r in &self.rows {
            bits.push(r as u64, w);
        }
        bits
    }

    /// Decodes an encoding produced by [`encode`](Self::encode) for the
    /// same state set.
    pub fn decode(states: Arc<StateSet>, bits: &BitString) -> Result<CaTable> {
        let expected = encoded_len(&states).ok_or(Error::BudgetExceeded {
            what: "encoded table length",
            needed: "overflow".into(),
            budget: u64::MAX.to_string(),
        })?;
        if bits.len() != expected {
            return Err(Error::Truncated { expected, got: bits.len() });
        }
        let w = states.width();
        let s = states.len() as u64;
        let rows_n = row_count(states.len()).unwrap();
        let mut rows = Vec::with_capacity(rows_n as usize);
        for r in 0..rows_n {
            let v = bits.read(r * w as u64, w)?;
            if v >= s {
                return Err(Error::Width { index: v, width: w });
            }
            rows.push(v as u16);
        }
        Ok(CaTable { states, rows })
    }

    /// One step computed purely by table lookups.
    pub fn step(&self, c: &Configuration) -> Result<Configuration> {
        let (n, m) = (self.states.n(), self.states.m());
        if c.dims() != (n, m) {
            return Err(Error::DimensionMismatch { expected: (n, m), got: c.dims() });
        }
        let mut cells = Vec::with_capacity(c.len());
        for p in c.positions() {
            let nb = c.neighbourhood(p);
            let mut idx = [0u32; 5];
            for (k, s) in nb.iter().enumerate() {
                idx[k] = self.states.index_of(s).ok_or_else(|| {
                    Error::InvalidConfiguration(format!("state at {p} is not in S_{{n,m}}"))
                })?;
            }
            cells.push(*self.states.state(self.output(idx)));
        }
        Ok(Configuration::from_cells_unchecked(n, m, cells))
    }

    /// File form: `CATB`, `n` and `m` as big-endian u32, the bit length as
    /// big-endian u64, then the encoded bytes.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        let bits = self.encode();
        w.write_all(MAGIC)?;
        w.write_all(&(self.states.n() as u32).to_be_bytes())?;
        w.write_all(&(self.states.m() as u32).to_be_bytes())?;
        w.write_all(&bits.len().to_be_bytes())?;
        w.write_all(bits.as_bytes())
    }

    pub fn read_from(mut r: impl Read) -> Result<CaTable> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)
            .map_err(|e| Error::InvalidConfiguration(format!("cannot read table: {e}")))?;
        if buf.len() < 20 || &buf[..4] != MAGIC {
            return Err(Error::Truncated { expected: 160, got: buf.len() as u64 * 8 });
        }
        let n = u32::from_be_bytes(buf[4..8].try_into().unwrap()) as usize;
        let m = u32::from_be_bytes(buf[8..12].try_into().unwrap()) as usize;
        let len = u64::from_be_bytes(buf[12..20].try_into().unwrap());
        let states = Arc::new(StateSet::enumerate(n, m)?);
        let bits = BitString::from_bytes(buf[20..].to_vec(), len)?;
        CaTable::decode(states, &bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_dimacs;

    #[test]
    fn budget_is_enforced() {
        let aut = FormulaAutomaton::new(&parse_dimacs("p cnf 1 1\n1 0").unwrap());
        assert!(matches!(CaTable::materialize(&aut, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn encoded_length_formula() {
        let s = StateSet::enumerate(1, 1).unwrap();
        assert_eq!(encoded_len(&s), Some(39u64.pow(5) * 6));
    }
}
