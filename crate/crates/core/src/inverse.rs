//! Inverse automata for `A_phi`, the local inverse condition, refutation
//! files and the sequence coding of state tuples.
//!
//! An inverse automaton reads a window of `(2n+1) x (2m+3)` cells around
//! each cell. From any cell of the rectangle that window contains the whole
//! rectangle together with enough quiescent border to locate it, so the
//! preimage can be recovered locally.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{decompose, preimages, ConfigSampler};
use crate::automaton::FormulaAutomaton;
use crate::bits::BitString;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::formula::{gen_onto_php, Assignment, CnfFormula};
use crate::state::{CellState, Coord, StateSet};
use crate::tableau::build_table;
use crate::translate::{pairing, unpair};

/// Default number of sampled configurations for sampled checks.
pub const DEFAULT_SAMPLES: u64 = 10_000;

/// Default cap on exhaustive enumeration.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1 << 24;

/// Table classes are probed exhaustively up to this many variables.
const TABLE_PROBE_MAX_VARS: usize = 12;

/// The neighbourhood `M`: all offsets in `[-n, n] x [-(m+1), m+1]`, the
/// origin first and the rest row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    n: usize,
    m: usize,
}

impl Window {
    pub fn new(n: usize, m: usize) -> Self {
        Window { n, m }
    }

    fn width(&self) -> usize {
        2 * self.m + 3
    }

    /// `mu = |M|`.
    pub fn len(&self) -> usize {
        (2 * self.n + 1) * self.width()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let (n, m1) = (self.n as isize, self.m as isize + 1);
        let mut out = vec![(0, 0)];
        for di in -n..=n {
            for dj in -m1..=m1 {
                if (di, dj) != (0, 0) {
                    out.push((di, dj));
                }
            }
        }
        out
    }

    fn slot(&self, di: isize, dj: isize) -> usize {
        if (di, dj) == (0, 0) {
            return 0;
        }
        let k = (di + self.n as isize) as usize * self.width() + (dj + self.m as isize + 1) as usize;
        let center = self.n * self.width() + self.m + 1;
        if k < center {
            k + 1
        } else {
            k
        }
    }

    /// State indices of the window around `pos`; `q` outside the rectangle.
    pub fn read(&self, grid: &[u32], q: u32, pos: Coord) -> Vec<u32> {
        let cols = self.m + 2;
        self.offsets()
            .into_iter()
            .map(|(di, dj)| {
                let (i, j) = (pos.i as isize + di, pos.j as isize + dj);
                if i < 0 || j < 0 || i as usize > self.n || j as usize >= cols {
                    q
                } else {
                    grid[i as usize * cols + j as usize]
                }
            })
            .collect()
    }

    /// Recovers the center's position and the whole rectangle from a window
    /// that some configuration of `Config_{n,m}` could produce.
    pub fn locate(&self, states: &StateSet, w: &[u32]) -> Option<(Coord, Configuration)> {
        let q = states.quiescent_index();
        if w.len() != self.len() || w[0] == q {
            return None;
        }
        let at = |di: isize, dj: isize| w[self.slot(di, dj)];
        let i = (1..=self.n as isize).take_while(|&d| at(-d, 0) != q).count();
        let j = (1..=self.m as isize + 1).take_while(|&d| at(0, -d) != q).count();
        let (n, m1) = (self.n as isize, self.m as isize + 1);
        let mut cells = Vec::with_capacity((self.n + 1) * (self.m + 2));
        for di in -n..=n {
            for dj in -m1..=m1 {
                let (r, c) = (di + i as isize, dj + j as isize);
                let inside = r >= 0 && c >= 0 && r <= n && c <= m1;
                let s = at(di, dj);
                if inside != (s != q) {
                    return None;
                }
            }
        }
        for r in 0..=self.n {
            for c in 0..=self.m + 1 {
                cells.push(*states.state(at(r as isize - i as isize, c as isize - j as isize)));
            }
        }
        let conf = Configuration::new(self.n, self.m, cells).ok()?;
        Some((Coord::new(i, j), conf))
    }
}

/// State indices of every cell, row-major.
pub fn index_grid(states: &StateSet, c: &Configuration) -> Result<Vec<u32>> {
    c.cells()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            states.index_of(s).ok_or_else(|| {
                Error::InvalidConfiguration(format!("state at {} is not in S_{{n,m}}", c.pos(k)))
            })
        })
        .collect()
}

/// How `g` treats windows without an explicit row.
#[derive(Clone, Debug)]
pub enum Base {
    /// Recover the preimage under `A_psi` for the given automaton.
    Structural(FormulaAutomaton),
    /// Return the center unchanged.
    Identity,
}

/// An inverse-candidate automaton `B = (2, M, S, g)`.
#[derive(Clone, Debug)]
pub struct InverseAutomaton {
    states: Arc<StateSet>,
    window: Window,
    base: Base,
    rows: BTreeMap<Vec<u32>, u32>,
}

/// Builds the structural inverse of `A_phi`, or reports a satisfying
/// assignment together with the length of its blue cycle.
pub fn structural_inverse(phi: &CnfFormula) -> Result<InverseAutomaton> {
    let aut = FormulaAutomaton::new(phi);
    if let Some(a) = aut.formula().first_satisfying() {
        let t = build_table(aut.formula(), &a)?;
        let cycle_len = decompose(&aut, &t)?.cycle.map_or(0, |c| c.len());
        return Err(Error::Satisfiable { assignment: a.to_string(), cycle_len });
    }
    Ok(InverseAutomaton::structural_unchecked(aut))
}

impl InverseAutomaton {
    /// Structural inverse without the satisfiability check.
    pub fn structural_unchecked(aut: FormulaAutomaton) -> Self {
        InverseAutomaton {
            states: aut.states().clone(),
            window: Window::new(aut.n(), aut.m()),
            base: Base::Structural(aut),
            rows: BTreeMap::new(),
        }
    }

    pub fn identity(states: Arc<StateSet>) -> Self {
        let window = Window::new(states.n(), states.m());
        InverseAutomaton { states, window, base: Base::Identity, rows: BTreeMap::new() }
    }

    pub fn states(&self) -> &Arc<StateSet> {
        &self.states
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn mu(&self) -> usize {
        self.window.len()
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn rows(&self) -> &BTreeMap<Vec<u32>, u32> {
        &self.rows
    }

    pub fn insert_row(&mut self, key: Vec<u32>, out: u32) -> Result<()> {
        let s = self.states.len() as u32;
        if key.len() != self.mu() || out >= s || key.iter().any(|&k| k >= s) {
            return Err(Error::MalformedRefutation("row does not match the state set or window".into()));
        }
        self.rows.insert(key, out);
        Ok(())
    }

    /// Output of the base procedure on a window.
    pub fn base_output(&self, w: &[u32]) -> u32 {
        let Base::Structural(aut) = &self.base else { return w[0] };
        let Some((pos, image)) = self.window.locate(&self.states, w) else { return w[0] };
        match preimages(aut, &image).as_deref() {
            Ok([x]) => self.states.index_of(x.at(pos)).unwrap_or(w[0]),
            _ => w[0],
        }
    }

    /// The local rule `g`.
    pub fn g(&self, w: &[u32]) -> u32 {
        match self.rows.get(w) {
            Some(&out) => out,
            None => self.base_output(w),
        }
    }

    /// Adds an explicit row, with the base output, for every window of
    /// every image `A(x)`.
    pub fn tabulate<'a>(
        &mut self,
        aut: &FormulaAutomaton,
        configs: impl IntoIterator<Item = &'a Configuration>,
    ) -> Result<()> {
        let q = self.states.quiescent_index();
        for x in configs {
            let y = aut.step(x)?;
            let grid = index_grid(&self.states, &y)?;
            for p in y.positions() {
                let w = self.window.read(&grid, q, p);
                let out = self.base_output(&w);
                self.rows.insert(w, out);
            }
        }
        Ok(())
    }

    fn check_states(&self, states: &StateSet) -> Result<()> {
        if (states.n(), states.m()) != (self.states.n(), self.states.m()) {
            return Err(Error::DimensionMismatch {
                expected: (self.states.n(), self.states.m()),
                got: (states.n(), states.m()),
            });
        }
        Ok(())
    }
}

/// One synchronous application of `B`.
pub fn apply_inverse(b: &InverseAutomaton, c: &Configuration) -> Result<Configuration> {
    let (n, m) = (b.states.n(), b.states.m());
    if c.dims() != (n, m) {
        return Err(Error::DimensionMismatch { expected: (n, m), got: c.dims() });
    }
    let grid = index_grid(&b.states, c)?;
    let q = b.states.quiescent_index();
    let cells = c.positions().map(|p| *b.states.state(b.g(&b.window.read(&grid, q, p)))).collect();
    Ok(Configuration::from_cells_unchecked(n, m, cells))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive { budget: u64 },
    Sampled { samples: u64, seed: u64 },
}

/// A configuration on which `B(A(x))` differs from `x` at `cell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub cell: Coord,
    /// The states assigned to the cells of `N(M(cell))` inside the rectangle.
    pub config: Configuration,
    pub expected: CellState,
    pub got: CellState,
    /// Sequence code of the window `g` was applied to.
    pub window_code: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvOutcome {
    Holds,
    /// `t <= |S|^(10 mu)`.
    SizeGate,
    Counterexample(Box<Counterexample>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvReport {
    pub outcome: InvOutcome,
    pub exhaustive: bool,
    pub configurations: u64,
    /// Checked (configuration, cell) pairs.
    pub tuples: u64,
    pub rows_checked: u64,
    pub seed: Option<u64>,
}

impl InvReport {
    pub fn holds(&self) -> bool {
        self.outcome == InvOutcome::Holds
    }
}

/// `|S|^(10 mu)`.
pub fn size_gate(states: usize, mu: usize) -> BigUint {
    BigUint::from(states).pow(10 * mu as u32)
}

fn config_count(states: &StateSet) -> Option<u64> {
    let cells = (states.n() + 1) * (states.m() + 2);
    (states.len() as u64 - 1).checked_pow(cells as u32)
}

/// Checks `B(A(x)) = x` cell by cell on `x`.
fn check_config(
    a: &FormulaAutomaton,
    b: &InverseAutomaton,
    x: &Configuration,
) -> Result<Option<Counterexample>> {
    let y = a.step(x)?;
    let xs = index_grid(&b.states, x)?;
    let ys = index_grid(&b.states, &y)?;
    let q = b.states.quiescent_index();
    for p in x.positions() {
        let w = b.window.read(&ys, q, p);
        let out = b.g(&w);
        let k = x.flat(p);
        if out != xs[k] {
            return Ok(Some(Counterexample {
                cell: p,
                config: x.clone(),
                expected: *x.at(p),
                got: *b.states.state(out),
                window_code: sequence_code(&w, b.states.width())?,
            }));
        }
    }
    Ok(None)
}

/// Checks every explicit row exactly against all configurations whose image
/// shows that window.
fn check_rows(a: &FormulaAutomaton, b: &InverseAutomaton) -> Result<Option<Counterexample>> {
    for (w, &out) in &b.rows {
        let Some((pos, image)) = b.window.locate(&b.states, w) else { continue };
        for x in preimages(a, &image)? {
            let expected = *x.at(pos);
            if b.states.index_of(&expected) != Some(out) {
                return Ok(Some(Counterexample {
                    cell: pos,
                    config: x,
                    expected,
                    got: *b.states.state(out),
                    window_code: sequence_code(w, b.states.width())?,
                }));
            }
        }
    }
    Ok(None)
}

/// Mixed sampler: uniform configurations, relabeled and mutated tables,
/// and preimages of explicit rows.
struct Probe<'a> {
    a: &'a FormulaAutomaton,
    b: &'a InverseAutomaton,
    sampler: ConfigSampler,
    rows: Vec<&'a Vec<u32>>,
}

impl<'a> Probe<'a> {
    fn new(a: &'a FormulaAutomaton, b: &'a InverseAutomaton) -> Self {
        Probe { a, b, sampler: ConfigSampler::new(&b.states), rows: b.rows.keys().collect() }
    }

    fn sample(&self, k: u64, rng: &mut ChaCha8Rng) -> Result<Configuration> {
        let phi = self.a.formula();
        Ok(match k % 4 {
            0 => self.sampler.configuration(rng),
            1 => self.sampler.near_table(phi, 0, rng),
            2 => self.sampler.near_table(phi, 1 + rng.gen_range(0..2), rng),
            _ => {
                if !self.rows.is_empty() {
                    let w = self.rows[rng.gen_range(0..self.rows.len())];
                    if let Some((_, image)) = self.b.window.locate(&self.b.states, w) {
                        let pre = preimages(self.a, &image)?;
                        if !pre.is_empty() {
                            return Ok(pre[rng.gen_range(0..pre.len())].clone());
                        }
                    }
                }
                self.sampler.near_table(phi, 0, rng)
            }
        })
    }

    /// Every computation table with all-zero and all-one labels.
    fn tables(&self) -> Vec<Configuration> {
        let phi = self.a.formula();
        if phi.m() > TABLE_PROBE_MAX_VARS {
            return Vec::new();
        }
        phi.assignments()
            .flat_map(|a: Assignment| {
                let t = build_table(phi, &a).expect("assignment length matches");
                let ones = t.with_labels(std::iter::repeat_n(true, t.len()));
                [t, ones]
            })
            .collect()
    }
}

/// Enumerates every configuration over the non-quiescent states.
fn for_each_config(
    states: &StateSet,
    mut f: impl FnMut(&Configuration) -> Result<bool>,
) -> Result<u64> {
    let (n, m) = (states.n(), states.m());
    let cells = (n + 1) * (m + 2);
    let pool: Vec<CellState> = states.states().iter().filter(|s| !s.is_quiescent()).copied().collect();
    let mut digits = vec![0usize; cells];
    let mut count = 0;
    loop {
        let c = Configuration::from_cells_unchecked(n, m, digits.iter().map(|&d| pool[d]).collect());
        count += 1;
        if !f(&c)? {
            return Ok(count);
        }
        let mut k = 0;
        loop {
            if k == cells {
                return Ok(count);
            }
            digits[k] += 1;
            if digits[k] < pool.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn same_dims(a: &FormulaAutomaton, b: &InverseAutomaton) -> Result<()> {
    b.check_states(a.states())
}

/// The local inverse condition: the size gate `|S|^(10 mu) < t`, then
/// `s_c = g(f(...), ..., f(...))` for every cell `c` and every assignment of
/// states to `N(M(c))`. Explicit rows are always checked exactly; the rest is
/// enumerated or sampled according to `mode`.
pub fn check_inv_local(
    a: &FormulaAutomaton,
    b: &InverseAutomaton,
    t: &BigUint,
    mode: CheckMode,
) -> Result<InvReport> {
    same_dims(a, b)?;
    let mut report = InvReport {
        outcome: InvOutcome::Holds,
        exhaustive: false,
        configurations: 0,
        tuples: 0,
        rows_checked: 0,
        seed: None,
    };
    if *t <= size_gate(b.states.len(), b.mu()) {
        report.outcome = InvOutcome::SizeGate;
        return Ok(report);
    }
    report.rows_checked = b.rows.len() as u64;
    if let Some(cx) = check_rows(a, b)? {
        report.outcome = InvOutcome::Counterexample(Box::new(cx));
        return Ok(report);
    }
    let cells = a.cells() as u64;
    let mut found = None;
    match resolve_mode(&b.states, mode) {
        CheckMode::Exhaustive { .. } => {
            report.exhaustive = true;
            report.configurations = for_each_config(&b.states, |x| {
                found = check_config(a, b, x)?;
                Ok(found.is_none())
            })?;
        }
        CheckMode::Sampled { samples, seed } => {
            report.seed = Some(seed);
            let probe = Probe::new(a, b);
            for x in probe.tables() {
                report.configurations += 1;
                if let Some(cx) = check_config(a, b, &x)? {
                    found = Some(cx);
                    break;
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..samples {
                if found.is_some() {
                    break;
                }
                let x = probe.sample(k, &mut rng)?;
                report.configurations += 1;
                found = check_config(a, b, &x)?;
            }
        }
    }
    report.tuples = report.configurations * cells;
    if let Some(cx) = found {
        report.outcome = InvOutcome::Counterexample(Box::new(cx));
    }
    Ok(report)
}

/// Falls back to sampling when exhaustive enumeration is over budget.
fn resolve_mode(states: &StateSet, mode: CheckMode) -> CheckMode {
    match mode {
        CheckMode::Exhaustive { budget } if config_count(states).is_some_and(|c| c <= budget) => mode,
        CheckMode::Exhaustive { .. } => CheckMode::Sampled { samples: DEFAULT_SAMPLES, seed: 0 },
        sampled => sampled,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalReport {
    pub exhaustive: bool,
    pub configurations: u64,
    pub seed: Option<u64>,
    pub counterexample: Option<Configuration>,
}

/// Checks `B(A(C)) = C` on whole configurations.
pub fn check_inverse_global(a: &FormulaAutomaton, b: &InverseAutomaton, mode: CheckMode) -> Result<GlobalReport> {
    same_dims(a, b)?;
    let round_trip = |x: &Configuration| -> Result<bool> { Ok(apply_inverse(b, &a.step(x)?)? == *x) };
    let mut report = GlobalReport { exhaustive: false, configurations: 0, seed: None, counterexample: None };
    match mode {
        CheckMode::Exhaustive { budget } => {
            let needed = config_count(&b.states);
            if needed.is_none_or(|c| c > budget) {
                let cells = (b.states.n() + 1) * (b.states.m() + 2);
                return Err(Error::BudgetExceeded {
                    what: "configurations",
                    needed: format!("{}^{}", b.states.len() - 1, cells),
                    budget: budget.to_string(),
                });
            }
            report.exhaustive = true;
            let mut bad = None;
            report.configurations = for_each_config(&b.states, |x| {
                if !round_trip(x)? {
                    bad = Some(x.clone());
                }
                Ok(bad.is_none())
            })?;
            report.counterexample = bad;
        }
        CheckMode::Sampled { samples, seed } => {
            report.seed = Some(seed);
            let probe = Probe::new(a, b);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..samples {
                let x = probe.sample(k, &mut rng)?;
                report.configurations += 1;
                if !round_trip(&x)? {
                    report.counterexample = Some(x);
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// Sequence code of state indices: bit `<i, j>` is bit `i` of `s_j`.
pub fn sequence_code(indices: &[u32], width: u32) -> Result<BigUint> {
    let mut code = BigUint::zero();
    for (j, &s) in indices.iter().enumerate() {
        if width < 32 && s >> width != 0 {
            return Err(Error::Width { index: s as u64, width });
        }
        for i in 0..width {
            if s >> i & 1 == 1 {
                code.set_bit(pairing(i as u64, j as u64) as u64, true);
            }
        }
    }
    Ok(code)
}

/// Inverse of [`sequence_code`] for `len` indices of `width` bits.
pub fn sequence_decode(code: &BigUint, len: usize, width: u32) -> Result<Vec<u32>> {
    let mut out = vec![0u32; len];
    for pos in 0..code.bits() {
        if !code.bit(pos) {
            continue;
        }
        let (i, j) = unpair(pos as u128);
        if i >= width as u128 || j >= len as u128 {
            return Err(Error::CodeOverflow);
        }
        out[j as usize] |= 1 << i;
    }
    Ok(out)
}

/// Bit length of the largest sequence code of `len` indices of `width` bits.
pub fn sequence_code_bits(len: usize, width: u32) -> u64 {
    if len == 0 || width == 0 {
        return 0;
    }
    (pairing(width as u64 - 1, len as u64 - 1) + 1) as u64
}

/// A refutation: an inverse candidate and its declared size `t`.
#[derive(Clone, Debug)]
pub struct Refutation {
    pub b: InverseAutomaton,
    pub t: BigUint,
    pub digest: String,
}

const HEADER: &str = "pca-refutation v1";

impl Refutation {
    /// Wraps `b` with `t = |S|^(10 mu) + 1`.
    pub fn new(b: InverseAutomaton) -> Self {
        let t = size_gate(b.states.len(), b.mu()) + BigUint::one();
        let digest = b.states.digest();
        Refutation { b, t, digest }
    }

    pub fn payload_bits(&self) -> u64 {
        self.b.rows.len() as u64 * (self.b.mu() as u64 + 1) * self.b.states.width() as u64
    }

    /// Text header followed by the packed rows, each `mu` window indices and
    /// one output index of `⌈log2 |S|⌉` bits.
    pub fn to_bytes(&self) -> Vec<u8> {
        let b = &self.b;
        let mut h = String::new();
        let _ = writeln!(h, "{HEADER}");
        let _ = writeln!(h, "n {}", b.states.n());
        let _ = writeln!(h, "m {}", b.states.m());
        let _ = writeln!(h, "mu {}", b.mu());
        let _ = writeln!(h, "t {}", self.t);
        let offs: Vec<String> = b.window.offsets().iter().map(|(i, j)| format!("{i},{j}")).collect();
        let _ = writeln!(h, "offsets {}", offs.join(" "));
        let _ = writeln!(h, "states {}", self.digest);
        match &b.base {
            Base::Identity => h.push_str("base identity\n"),
            Base::Structural(aut) => {
                let f = aut.formula();
                let lits: Vec<String> =
                    (1..=f.n()).map(|i| f.clause(i).iter().map(|l| format!("{l} ")).collect::<String>() + "0").collect();
                let _ = writeln!(h, "base structural {}", lits.join(" "));
            }
        }
        let _ = writeln!(h, "rows {}", b.rows.len());
        let _ = writeln!(h, "payload {}", self.payload_bits());
        h.push('\n');
        let w = b.states.width();
        let mut bits = BitString::with_capacity(self.payload_bits());
        for (key, &out) in &b.rows {
            for &k in key {
                bits.push(k as u64, w);
            }
            bits.push(out as u64, w);
        }
        let mut bytes = h.into_bytes();
        bytes.extend_from_slice(bits.as_bytes());
        bytes
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::MalformedRefutation(msg.to_string());
        let split = bytes.windows(2).position(|w| w == b"\n\n").ok_or_else(|| bad("missing header terminator"))?;
        let header = std::str::from_utf8(&bytes[..split]).map_err(|_| bad("header is not UTF-8"))?;
        let payload = &bytes[split + 2..];
        let mut lines = header.lines();
        if lines.next() != Some(HEADER) {
            return Err(bad("unknown header"));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(&format!("missing `{name}`")))?;
            let rest = line
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| bad(&format!("expected `{name}`")))?;
            Ok(rest.to_string())
        };
        let num = |s: String, what: &str| s.trim().parse::<usize>().map_err(|_| bad(&format!("invalid {what}")));
        let n = num(field("n")?, "n")?;
        let m = num(field("m")?, "m")?;
        let mu = num(field("mu")?, "mu")?;
        let t: BigUint = field("t")?.trim().parse().map_err(|_| bad("invalid t"))?;
        let offsets = field("offsets")?;
        let digest = field("states")?.trim().to_string();
        let base_line = field("base")?;
        let rows = num(field("rows")?, "rows")?;
        let payload_len: u64 = field("payload")?.trim().parse().map_err(|_| bad("invalid payload"))?;

        let states = Arc::new(StateSet::enumerate(n, m)?);
        let window = Window::new(n, m);
        let expected: Vec<String> = window.offsets().iter().map(|(i, j)| format!("{i},{j}")).collect();
        if mu != window.len() || offsets.split_whitespace().ne(expected.iter().map(String::as_str)) {
            return Err(bad("neighbourhood does not match the dimensions"));
        }
        let mut b = match base_line.split_once(' ').unwrap_or((base_line.as_str(), "")) {
            ("identity", _) => InverseAutomaton::identity(states.clone()),
            ("structural", lits) => {
                let lits: Vec<i64> =
                    lits.split_whitespace().map(|l| l.parse().map_err(|_| bad("invalid literal"))).collect::<Result<_>>()?;
                let clauses: Vec<Vec<i64>> = lits.split(|&l| l == 0).filter(|c| !c.is_empty()).map(<[i64]>::to_vec).collect();
                let f = CnfFormula::from_clauses(m, &clauses)?;
                if f.n() != n {
                    return Err(bad("base formula has the wrong clause count"));
                }
                InverseAutomaton::structural_unchecked(FormulaAutomaton::new(&f))
            }
            _ => return Err(bad("unknown base")),
        };
        let w = states.width();
        if payload_len != rows as u64 * (mu as u64 + 1) * w as u64 {
            return Err(bad("payload length does not match the row count"));
        }
        let bits = BitString::from_bytes(payload.to_vec(), payload_len)?;
        let mut pos = 0;
        for _ in 0..rows {
            let mut key = Vec::with_capacity(mu);
            for _ in 0..mu {
                key.push(bits.read(pos, w)? as u32);
                pos += w as u64;
            }
            let out = bits.read(pos, w)? as u32;
            pos += w as u64;
            b.insert_row(key, out)?;
        }
        Ok(Refutation { b, t, digest })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    StateSet { expected: String, got: String },
    SizeGate,
    PayloadExceedsT,
    Local(Box<Counterexample>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationVerdict {
    Accepted(InvReport),
    Rejected(Rejection),
}

impl RefutationVerdict {
    pub fn accepted(&self) -> bool {
        matches!(self, RefutationVerdict::Accepted(_))
    }
}

/// Checks that `r` refutes `phi`: the state set matches, `t` passes the size
/// gate and covers the payload, and the local inverse condition holds.
pub fn verify_refutation(phi: &CnfFormula, r: &Refutation, mode: CheckMode) -> Result<RefutationVerdict> {
    let a = FormulaAutomaton::new(phi);
    let expected = a.states().digest();
    if a.dims() != (r.b.states.n(), r.b.states.m()) || r.digest != expected {
        return Ok(RefutationVerdict::Rejected(Rejection::StateSet { expected, got: r.digest.clone() }));
    }
    if r.t <= size_gate(r.b.states.len(), r.b.mu()) {
        return Ok(RefutationVerdict::Rejected(Rejection::SizeGate));
    }
    if BigUint::from(r.payload_bits()) > r.t {
        return Ok(RefutationVerdict::Rejected(Rejection::PayloadExceedsT));
    }
    let report = check_inv_local(&a, &r.b, &r.t, mode)?;
    Ok(match report.outcome {
        InvOutcome::Holds => RefutationVerdict::Accepted(report),
        InvOutcome::SizeGate => RefutationVerdict::Rejected(Rejection::SizeGate),
        InvOutcome::Counterexample(cx) => RefutationVerdict::Rejected(Rejection::Local(cx)),
    })
}

/// Structural inverse of an unsatisfiable `phi` with explicit rows for the
/// windows of every computation table's image.
pub fn build_refutation(phi: &CnfFormula) -> Result<Refutation> {
    let mut b = structural_inverse(phi)?;
    let Base::Structural(aut) = b.base.clone() else { unreachable!("structural base") };
    let tables: Vec<Configuration> =
        aut.formula().assignments().map(|a| build_table(aut.formula(), &a)).collect::<Result<_>>()?;
    b.tabulate(&aut, &tables)?;
    Ok(Refutation::new(b))
}

/// Sizes of the structural inverse for one formula of the PHP family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeRow {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub states: usize,
    /// Window size of the inverse automaton.
    pub mu: usize,
    /// Cells of the rectangle, `(n+1)(m+2)`.
    pub region: usize,
    /// `log2` of the table size bound `|S|^mu * ⌈log2 |S|⌉` in bits.
    pub table_bits_log2: f64,
    /// `log2 |S|^(10 mu)`.
    pub gate_log2: f64,
    /// Bit length of the largest sequence code of a window.
    pub code_bits: u64,
    /// `10 * mu * ⌈log2 |S|⌉`.
    pub code_bound: u64,
}

pub fn size_report(k_max: usize) -> Vec<SizeRow> {
    (1..=k_max)
        .map(|k| {
            let phi = gen_onto_php(k).normalize_odd();
            let (n, m) = (phi.n(), phi.m());
            let s = crate::state::state_count(n, m);
            let w = crate::state::index_width(s);
            let mu = Window::new(n, m).len();
            let ls = (s as f64).log2();
            SizeRow {
                k,
                n,
                m,
                states: s,
                mu,
                region: (n + 1) * (m + 2),
                table_bits_log2: mu as f64 * ls + (w as f64).log2(),
                gate_log2: 10.0 * mu as f64 * ls,
                code_bits: sequence_code_bits(mu, w),
                code_bound: 10 * mu as u64 * w as u64,
            }
        })
        .collect()
}
