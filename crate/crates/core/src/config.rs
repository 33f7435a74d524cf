//! Bounded configurations inside `[n+1] x [m+2]`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::state::{CellState, Coord};

static QUIESCENT: CellState = CellState::QUIESCENT;

/// Von Neumann offsets in order: self, right, left, below, above.
pub const NEIGHBOURHOOD: [(isize, isize); 5] = [(0, 0), (0, 1), (0, -1), (1, 0), (-1, 0)];

/// The five neighbourhood positions of `pos`, center first. Positions may
/// fall outside the rectangle, where cells read as quiescent.
pub fn neighbourhood_of(pos: (isize, isize)) -> [(isize, isize); 5] {
    NEIGHBOURHOOD.map(|(di, dj)| (pos.0 + di, pos.1 + dj))
}

/// A configuration whose non-quiescent part is exactly the
/// `(n+1) x (m+2)` rectangle; everything outside is `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    m: usize,
    cells: Vec<CellState>,
}

impl Configuration {
    /// Row-major cells. Every cell must carry coordinates inside the
    /// rectangle and a label; no cell may be quiescent.
    pub fn new(n: usize, m: usize, cells: Vec<CellState>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyFormula);
        }
        if cells.len() != (n + 1) * (m + 2) {
            return Err(Error::InvalidConfiguration(format!(
                "expected {} cells, got {}",
                (n + 1) * (m + 2),
                cells.len()
            )));
        }
        for (k, s) in cells.iter().enumerate() {
            let pos = (k / (m + 2), k % (m + 2));
            match s.coord {
                _ if s.is_quiescent() => {
                    return Err(Error::InvalidConfiguration(format!("cell {pos:?} is quiescent")))
                }
                None => {
                    return Err(Error::InvalidConfiguration(format!("cell {pos:?} has no coordinates")))
                }
                Some(c) if c.i > n || c.j > m + 1 => {
                    return Err(Error::InvalidConfiguration(format!(
                        "cell {pos:?} writes coordinates {c} outside the rectangle"
                    )))
                }
                _ => {}
            }
            if s.label.is_none() {
                return Err(Error::InvalidConfiguration(format!("cell {pos:?} has no label")));
            }
        }
        Ok(Configuration { n, m, cells })
    }

    pub(crate) fn from_cells_unchecked(n: usize, m: usize, cells: Vec<CellState>) -> Self {
        debug_assert_eq!(cells.len(), (n + 1) * (m + 2));
        Configuration { n, m, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn rows(&self) -> usize {
        self.n + 1
    }

    pub fn cols(&self) -> usize {
        self.m + 2
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn contains(&self, i: isize, j: isize) -> bool {
        i >= 0 && j >= 0 && (i as usize) <= self.n && (j as usize) <= self.m + 1
    }

    /// State at `(i, j)`, `q` outside the rectangle.
    pub fn get(&self, i: isize, j: isize) -> &CellState {
        if self.contains(i, j) {
            &self.cells[i as usize * (self.m + 2) + j as usize]
        } else {
            &QUIESCENT
        }
    }

    pub fn at(&self, pos: Coord) -> &CellState {
        &self.cells[self.flat(pos)]
    }

    pub fn flat(&self, pos: Coord) -> usize {
        pos.i * (self.m + 2) + pos.j
    }

    pub fn pos(&self, flat: usize) -> Coord {
        Coord::new(flat / (self.m + 2), flat % (self.m + 2))
    }

    pub fn positions(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.cells.len()).map(|k| self.pos(k))
    }

    /// The states of the von Neumann neighbourhood of `pos`.
    pub fn neighbourhood(&self, pos: Coord) -> [CellState; 5] {
        let (i, j) = (pos.i as isize, pos.j as isize);
        NEIGHBOURHOOD.map(|(di, dj)| *self.get(i + di, j + dj))
    }

    /// Replaces the state at `pos`. Fails if the new state would break the
    /// configuration's invariants.
    pub fn set(&mut self, pos: Coord, state: CellState) -> Result<()> {
        let mut cells = self.cells.clone();
        let k = self.flat(pos);
        cells[k] = state;
        *self = Configuration::new(self.n, self.m, cells)?;
        Ok(())
    }

    pub fn labels(&self) -> impl Iterator<Item = bool> + '_ {
        self.cells.iter().map(|s| s.label == Some(true))
    }

    /// Same skeleton with the given labels (row-major).
    pub fn with_labels(&self, labels: impl IntoIterator<Item = bool>) -> Configuration {
        let cells = self.cells.iter().zip(labels).map(|(s, l)| s.with_label(l)).collect::<Vec<_>>();
        assert_eq!(cells.len(), self.cells.len(), "label vector length mismatch");
        Configuration { n: self.n, m: self.m, cells }
    }

    /// Labels packed little-endian by row-major cell index.
    pub fn label_mask(&self) -> u64 {
        assert!(self.cells.len() <= 64);
        self.labels().enumerate().fold(0, |acc, (k, l)| acc | (l as u64) << k)
    }

    /// Same skeleton with labels set from a row-major bit mask.
    pub fn with_label_mask(&self, mask: u64) -> Configuration {
        self.with_labels((0..self.cells.len()).map(|k| mask >> k & 1 == 1))
    }

    /// Equality up to labels.
    pub fn similar(&self, other: &Configuration) -> Result<bool> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: other.dims() });
        }
        Ok(self.cells.iter().zip(&other.cells).all(|(a, b)| a.skeleton() == b.skeleton()))
    }

    /// Text form: `config n m`, then `r c | <state>` per cell.
    pub fn to_text(&self) -> String {
        let mut out = format!("config {} {}\n", self.n, self.m);
        for (k, s) in self.cells.iter().enumerate() {
            let p = self.pos(k);
            let _ = writeln!(out, "{} {} | {}", p.i, p.j, s);
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Cells may appear in any
    /// order but each exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::ConfigParse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "config" {
            return Err(err(hl + 1, "expected `config n m`".into()));
        }
        let n: usize = h[1].parse().map_err(|_| err(hl + 1, "invalid n".into()))?;
        let m: usize = h[2].parse().map_err(|_| err(hl + 1, "invalid m".into()))?;
        if n == 0 || m == 0 {
            return Err(err(hl + 1, "n and m must be positive".into()));
        }
        let mut cells: Vec<Option<CellState>> = vec![None; (n + 1) * (m + 2)];
        for (ln, line) in lines {
            let (pos, state) = line.split_once('|').ok_or_else(|| err(ln + 1, "expected `r c | state`".into()))?;
            let p: Vec<usize> = pos
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(ln + 1, format!("invalid position `{t}`"))))
                .collect::<Result<_>>()?;
            if p.len() != 2 || p[0] > n || p[1] > m + 1 {
                return Err(err(ln + 1, format!("invalid position `{}`", pos.trim())));
            }
            let st: CellState = state.parse().map_err(|e| err(ln + 1, e))?;
            let slot = &mut cells[p[0] * (m + 2) + p[1]];
            if slot.replace(st).is_some() {
                return Err(err(ln + 1, format!("duplicate cell ({}, {})", p[0], p[1])));
            }
        }
        let cells: Vec<CellState> = cells
            .into_iter()
            .enumerate()
            .map(|(k, c)| c.ok_or_else(|| err(0, format!("missing cell ({}, {})", k / (m + 2), k % (m + 2)))))
            .collect::<Result<_>>()?;
        Configuration::new(n, m, cells)
    }

    /// Aligned grid in the style of a printed computation table.
    pub fn to_grid(&self) -> String {
        let text: Vec<String> = self.cells.iter().map(grid_cell).collect();
        let width = text.iter().map(|t| t.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        let rule = format!("+{}\n", vec!["-".repeat(width + 2); self.m + 2].join("+") + "+");
        out.push_str(&rule);
        for row in text.chunks(self.m + 2) {
            out.push('|');
            for t in row {
                let _ = write!(out, " {t:<width$} |");
            }
            out.push('\n');
            out.push_str(&rule);
        }
        out
    }
}

fn grid_cell(s: &CellState) -> String {
    let mut parts = vec![match s.coord {
        Some(c) => c.to_string(),
        None => "(_,_)".into(),
    }];
    parts.push(match s.label {
        Some(l) => (l as u8).to_string(),
        None => "_".into(),
    });
    if let Some(a) = s.a {
        parts.push(format!("a={}", a as u8));
    }
    if let Some(f) = s.flag {
        parts.push(format!("flag={}", f.as_i8()));
    }
    if let Some(pd) = s.pd {
        parts.push(format!("∨={}", pd as u8));
    }
    if let Some(pc) = s.pc {
        parts.push(format!("∧={}", pc as u8));
    }
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Configuration {
        let cells = (0..2)
            .flat_map(|i| (0..3).map(move |j| CellState::bare(Coord::new(i, j), (i + j) % 2 == 0)))
            .collect();
        Configuration::new(1, 1, cells).unwrap()
    }

    #[test]
    fn neighbourhood_offsets() {
        assert_eq!(neighbourhood_of((0, 0)), [(0, 0), (0, 1), (0, -1), (1, 0), (-1, 0)]);
        let c = tiny();
        let nb = c.neighbourhood(Coord::new(0, 0));
        assert_eq!(nb[0], *c.at(Coord::new(0, 0)));
        assert!(nb[2].is_quiescent() && nb[4].is_quiescent());
        assert!(c.get(-1, 0).is_quiescent() && c.get(2, 0).is_quiescent() && c.get(0, 3).is_quiescent());
    }

    #[test]
    fn rejects_quiescent_cells() {
        let mut cells = tiny().cells().to_vec();
        cells[3] = CellState::QUIESCENT;
        assert!(Configuration::new(1, 1, cells).is_err());
        let mut cells = tiny().cells().to_vec();
        cells[0].coord = Some(Coord::new(5, 0));
        assert!(Configuration::new(1, 1, cells).is_err());
        assert!(Configuration::new(1, 1, vec![]).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let c = tiny();
        assert_eq!(Configuration::parse(&c.to_text()).unwrap(), c);
        let text = c.to_text();
        let missing: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(Configuration::parse(&missing).is_err());
        let dup = format!("{text}0 0 | coord=(0,0) flag=_ a=_ pd=_ pc=_ label=0\n");
        assert!(Configuration::parse(&dup).is_err());
        assert!(Configuration::parse("config 1\n").is_err());
    }

    #[test]
    fn similarity() {
        let c = tiny();
        let d = c.with_label_mask(0b111111);
        assert!(c.similar(&d).unwrap());
        assert!(c.similar(&c).unwrap());
        assert_ne!(c, d);
        assert_eq!(d.label_mask(), 0b111111);
    }
}
