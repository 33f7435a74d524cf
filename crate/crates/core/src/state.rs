//! Cell states of `A_phi` and the canonical state set `S_{n,m}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formula::Polarity;

/// Written (or actual) table coordinates, `i` the row and `j` the column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Coord {
    pub i: usize,
    pub j: usize,
}

impl Coord {
    pub const fn new(i: usize, j: usize) -> Self {
        Coord { i, j }
    }

    /// `self + (di, dj)` if it stays non-negative.
    pub fn offset(self, di: isize, dj: isize) -> Option<Coord> {
        Some(Coord {
            i: self.i.checked_add_signed(di)?,
            j: self.j.checked_add_signed(dj)?,
        })
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// A cell state `((i,j), flag, a, pd, pc, label)`; `None` is the absent
/// symbol □.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellState {
    pub coord: Option<Coord>,
    pub flag: Option<Polarity>,
    pub a: Option<bool>,
    pub pd: Option<bool>,
    pub pc: Option<bool>,
    pub label: Option<bool>,
}

impl Default for CellState {
    fn default() -> Self {
        CellState::QUIESCENT
    }
}

/// Which of the seven state families a state's written coordinates put it in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    TopLeft = 1,
    ZerothColumn = 2,
    ZerothRow = 3,
    TopRight = 4,
    LastColumn = 5,
    MainBody = 6,
    Quiescent = 7,
}

impl CellState {
    pub const QUIESCENT: CellState =
        CellState { coord: None, flag: None, a: None, pd: None, pc: None, label: None };

    /// A state carrying only coordinates and a label.
    pub fn bare(coord: Coord, label: bool) -> Self {
        CellState { coord: Some(coord), label: Some(label), ..CellState::QUIESCENT }
    }

    pub fn is_quiescent(&self) -> bool {
        *self == CellState::QUIESCENT
    }

    /// The same state with label `label`.
    pub fn with_label(mut self, label: bool) -> Self {
        self.label = Some(label);
        self
    }

    /// The state with its label erased, used to compare skeletons.
    pub fn skeleton(mut self) -> Self {
        self.label = None;
        self
    }

    /// Family selected by the written coordinates, or `None` if the
    /// coordinates fall outside `[n+1] x [m+2]`.
    pub fn pattern(&self, n: usize, m: usize) -> Option<Pattern> {
        let Some(c) = self.coord else {
            return self.is_quiescent().then_some(Pattern::Quiescent);
        };
        Some(match (c.i, c.j) {
            (i, j) if i > n || j > m + 1 => return None,
            (0, 0) => Pattern::TopLeft,
            (_, 0) => Pattern::ZerothColumn,
            (0, j) if j <= m => Pattern::ZerothRow,
            (0, _) => Pattern::TopRight,
            (_, j) if j == m + 1 => Pattern::LastColumn,
            _ => Pattern::MainBody,
        })
    }

    /// Whether this state belongs to `S_{n,m}`: it has one of the seven
    /// shapes with every present component in its domain.
    pub fn is_member(&self, n: usize, m: usize) -> bool {
        let Some(p) = self.pattern(n, m) else { return false };
        let s = self;
        match p {
            Pattern::Quiescent => true,
            Pattern::TopLeft | Pattern::ZerothColumn | Pattern::TopRight => {
                s.flag.is_none() && s.a.is_none() && s.pd.is_none() && s.pc.is_none() && s.label.is_some()
            }
            Pattern::ZerothRow => {
                s.flag.is_none() && s.a.is_some() && s.pd.is_none() && s.pc.is_none() && s.label.is_some()
            }
            Pattern::LastColumn => {
                s.flag.is_none() && s.a.is_none() && s.pd.is_none() && s.pc.is_some() && s.label.is_some()
            }
            Pattern::MainBody => {
                s.flag.is_some() && s.a.is_some() && s.pd.is_some() && s.pc.is_none() && s.label.is_some()
            }
        }
    }

    fn sort_key(&self, n: usize, m: usize) -> impl Ord {
        (
            self.pattern(n, m).unwrap_or(Pattern::Quiescent),
            self.coord,
            self.flag,
            self.a,
            self.pd,
            self.pc,
            self.label,
        )
    }

    /// Canonical order on `S_{n,m}`: family, then components with □ first.
    pub fn canonical_cmp(&self, other: &CellState, n: usize, m: usize) -> Ordering {
        self.sort_key(n, m).cmp(&other.sort_key(n, m))
    }
}

fn bit(v: Option<bool>) -> &'static str {
    match v {
        None => "_",
        Some(false) => "0",
        Some(true) => "1",
    }
}

impl fmt::Display for CellState {
    /// `coord=(i,j) flag=F a=A pd=D pc=P label=L`, `_` for □.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coord {
            Some(c) => write!(f, "coord={c}")?,
            None => f.write_str("coord=(_,_)")?,
        }
        match self.flag {
            Some(p) => write!(f, " flag={}", p.as_i8())?,
            None => f.write_str(" flag=_")?,
        }
        write!(
            f,
            " a={} pd={} pc={} label={}",
            bit(self.a),
            bit(self.pd),
            bit(self.pc),
            bit(self.label)
        )
    }
}

impl FromStr for CellState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut st = CellState::QUIESCENT;
        let mut seen = [false; 6];
        for tok in s.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
            let parse_bit = |v: &str| match v {
                "_" => Ok(None),
                "0" => Ok(Some(false)),
                "1" => Ok(Some(true)),
                _ => Err(format!("invalid bit `{v}` for {key}")),
            };
            let slot = match key {
                "coord" => {
                    let inner = val
                        .strip_prefix('(')
                        .and_then(|v| v.strip_suffix(')'))
                        .ok_or_else(|| format!("invalid coord `{val}`"))?;
                    let (i, j) = inner.split_once(',').ok_or_else(|| format!("invalid coord `{val}`"))?;
                    st.coord = match (i.trim(), j.trim()) {
                        ("_", "_") => None,
                        (i, j) => Some(Coord::new(
                            i.parse().map_err(|_| format!("invalid row `{i}`"))?,
                            j.parse().map_err(|_| format!("invalid column `{j}`"))?,
                        )),
                    };
                    0
                }
                "flag" => {
                    st.flag = match val {
                        "_" => None,
                        v => Some(
                            v.parse::<i8>()
                                .ok()
                                .and_then(Polarity::from_i8)
                                .ok_or_else(|| format!("invalid flag `{v}`"))?,
                        ),
                    };
                    1
                }
                "a" => {
                    st.a = parse_bit(val)?;
                    2
                }
                "pd" => {
                    st.pd = parse_bit(val)?;
                    3
                }
                "pc" => {
                    st.pc = parse_bit(val)?;
                    4
                }
                "label" => {
                    st.label = parse_bit(val)?;
                    5
                }
                _ => return Err(format!("unknown component `{key}`")),
            };
            if std::mem::replace(&mut seen[slot], true) {
                return Err(format!("duplicate component `{key}`"));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err("all six components must be given".into());
        }
        Ok(st)
    }
}

/// `S_{n,m}` in canonical order, with a reverse index.
#[derive(Clone, Debug)]
pub struct StateSet {
    n: usize,
    m: usize,
    states: Vec<CellState>,
    index: HashMap<CellState, u32>,
}

/// `|S_{n,m}| = 24nm + 6n + 4m + 5`.
pub fn state_count(n: usize, m: usize) -> usize {
    24 * n * m + 6 * n + 4 * m + 5
}

/// Bits needed per state index, `⌈log2 s⌉` (at least 1).
pub fn index_width(s: usize) -> u32 {
    (usize::BITS - (s.max(2) - 1).leading_zeros()).max(1)
}

/// Two enumerations are equal when they describe the same dimensions.
impl PartialEq for StateSet {
    fn eq(&self, other: &Self) -> bool {
        (self.n, self.m) == (other.n, other.m)
    }
}

impl Eq for StateSet {}

impl StateSet {
    /// Enumerates `S_{n,m}`; `n` must be odd.
    pub fn enumerate(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyFormula);
        }
        if n.is_multiple_of(2) {
            return Err(Error::EvenClauseCount(n));
        }
        let bits = [false, true];
        let pols = [Polarity::Neg, Polarity::Absent, Polarity::Pos];
        let mut states = Vec::with_capacity(state_count(n, m));
        let push_bare = |c: Coord, states: &mut Vec<CellState>| {
            for l in bits {
                states.push(CellState::bare(c, l));
            }
        };
        push_bare(Coord::new(0, 0), &mut states);
        for i in 1..=n {
            push_bare(Coord::new(i, 0), &mut states);
        }
        for j in 1..=m {
            for a in bits {
                for l in bits {
                    states.push(CellState { a: Some(a), ..CellState::bare(Coord::new(0, j), l) });
                }
            }
        }
        push_bare(Coord::new(0, m + 1), &mut states);
        for i in 1..=n {
            for pc in bits {
                for l in bits {
                    states.push(CellState { pc: Some(pc), ..CellState::bare(Coord::new(i, m + 1), l) });
                }
            }
        }
        for i in 1..=n {
            for j in 1..=m {
                for flag in pols {
                    for a in bits {
                        for pd in bits {
                            for l in bits {
                                states.push(CellState {
                                    flag: Some(flag),
                                    a: Some(a),
                                    pd: Some(pd),
                                    ..CellState::bare(Coord::new(i, j), l)
                                });
                            }
                        }
                    }
                }
            }
        }
        states.push(CellState::QUIESCENT);
        states.sort_by(|x, y| x.canonical_cmp(y, n, m));
        let index = states.iter().enumerate().map(|(k, s)| (*s, k as u32)).collect();
        Ok(StateSet { n, m, states, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `⌈log2 |S|⌉`.
    pub fn width(&self) -> u32 {
        index_width(self.len())
    }

    pub fn states(&self) -> &[CellState] {
        &self.states
    }

    pub fn state(&self, idx: u32) -> &CellState {
        &self.states[idx as usize]
    }

    pub fn index_of(&self, s: &CellState) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn quiescent_index(&self) -> u32 {
        (self.len() - 1) as u32
    }

    /// Distinct label-free skeletons of non-quiescent states, each given
    /// with label 0.
    pub fn skeletons(&self) -> Vec<CellState> {
        self.states.iter().filter(|s| !s.is_quiescent() && s.label == Some(false)).copied().collect()
    }

    /// SHA-256 over the canonical enumeration, one state per line.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.states {
            h.update(s.to_string().as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_counts() {
        let s = StateSet::enumerate(1, 1).unwrap();
        assert_eq!(s.len(), 39);
        assert_eq!(s.width(), 6);
        assert_eq!(StateSet::enumerate(5, 3).unwrap().len(), 407);
        assert_eq!(state_count(5, 3), 407);
        for n in (1..8).step_by(2) {
            for m in 1..5 {
                assert_eq!(StateSet::enumerate(n, m).unwrap().len(), state_count(n, m));
            }
        }
        assert!(matches!(StateSet::enumerate(2, 1), Err(Error::EvenClauseCount(2))));
    }

    #[test]
    fn quiescent_once_and_last() {
        let s = StateSet::enumerate(3, 2).unwrap();
        assert_eq!(s.states().iter().filter(|x| x.is_quiescent()).count(), 1);
        assert!(s.state(s.quiescent_index()).is_quiescent());
        assert_eq!(s.skeletons().len(), (s.len() - 1) / 2);
    }

    #[test]
    fn canonical_order_and_membership() {
        let s = StateSet::enumerate(3, 2).unwrap();
        for w in s.states().windows(2) {
            assert_eq!(w[0].canonical_cmp(&w[1], 3, 2), Ordering::Less);
        }
        assert!(s.states().iter().all(|x| x.is_member(3, 2)));
        assert_eq!(s.state(0), &CellState::bare(Coord::new(0, 0), false));
        for (k, st) in s.states().iter().enumerate() {
            assert_eq!(s.index_of(st), Some(k as u32));
        }
        let bad = CellState { pc: Some(true), ..*s.state(40) };
        assert!(s.index_of(&bad).is_none() || bad.is_member(3, 2));
    }

    #[test]
    fn widths() {
        assert_eq!(index_width(2), 1);
        assert_eq!(index_width(39), 6);
        assert_eq!(index_width(64), 6);
        assert_eq!(index_width(65), 7);
    }

    #[test]
    fn text_round_trip() {
        let s = StateSet::enumerate(3, 2).unwrap();
        for st in s.states() {
            assert_eq!(st.to_string().parse::<CellState>().unwrap(), *st);
        }
        assert!("coord=(0,0) flag=_".parse::<CellState>().is_err());
        assert!("coord=(0,0) flag=2 a=_ pd=_ pc=_ label=0".parse::<CellState>().is_err());
    }
}
