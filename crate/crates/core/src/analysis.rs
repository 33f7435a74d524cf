//! Chain and cycle structure of configurations, injectivity decisions and
//! brute-force oracles.
//!
//! Blue cells point to their successor and every cell has at most one blue
//! predecessor, so the successor graph splits into pointed chains (ending in
//! a red cell) and at most one blue cycle, which then covers the rectangle.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automaton::FormulaAutomaton;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::formula::{Assignment, CnfFormula};
use crate::state::{CellState, Coord, StateSet};
use crate::tableau::{build_table, witness_pair};

/// Largest rectangle the label-enumerating oracle accepts.
pub const BRUTEFORCE_MAX_CELLS: usize = 24;

/// Largest variable count `decide_injectivity` scans.
pub const DECIDE_MAX_VARS: usize = 24;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainDecomposition {
    /// Maximal pointed chains: blue cells followed by the red cell they end in.
    pub chains: Vec<Vec<Coord>>,
    /// The blue cycle, starting from its top-left-most cell.
    pub cycle: Option<Vec<Coord>>,
    /// Red cells with no blue predecessor.
    pub isolated: Vec<Coord>,
}

impl ChainDecomposition {
    pub fn blue_count(&self) -> usize {
        self.chains.iter().map(|c| c.len() - 1).sum::<usize>() + self.cycle.as_ref().map_or(0, Vec::len)
    }

    pub fn red_count(&self) -> usize {
        self.chains.len() + self.isolated.len()
    }
}

/// Splits the successor graph of `c` into chains, the cycle and isolated
/// red cells.
pub fn decompose(aut: &FormulaAutomaton, c: &Configuration) -> Result<ChainDecomposition> {
    aut.check_dims(c)?;
    let suc = aut.successors(c);
    let mut pred: Vec<Option<usize>> = vec![None; c.len()];
    for (k, s) in suc.iter().enumerate() {
        if let Some(t) = *s {
            if pred[t].replace(k).is_some() {
                return Err(Error::Invariant(format!("cell {} has two blue predecessors", c.pos(t))));
            }
        }
    }
    let mut out = ChainDecomposition::default();
    let mut used = vec![false; c.len()];
    for r in (0..c.len()).filter(|&k| suc[k].is_none()) {
        used[r] = true;
        let mut chain = vec![r];
        let mut cur = r;
        while let Some(p) = pred[cur] {
            used[p] = true;
            chain.push(p);
            cur = p;
        }
        if chain.len() == 1 {
            out.isolated.push(c.pos(r));
        } else {
            out.chains.push(chain.into_iter().rev().map(|k| c.pos(k)).collect());
        }
    }
    if let Some(start) = (0..c.len()).find(|&k| !used[k]) {
        let mut cycle = vec![start];
        let mut cur = suc[start].expect("unused cells are blue");
        while cur != start {
            cycle.push(cur);
            cur = suc[cur].expect("unused cells are blue");
        }
        if cycle.len() != c.len() {
            return Err(Error::Invariant(format!(
                "blue cycle of length {} does not cover the {} cells",
                cycle.len(),
                c.len()
            )));
        }
        out.cycle = Some(cycle.into_iter().map(|k| c.pos(k)).collect());
    }
    Ok(out)
}

/// Whether `A_phi` is injective on the similarity class of `c`, decided by
/// looking for a red cell.
pub fn class_injective(aut: &FormulaAutomaton, c: &Configuration) -> Result<bool> {
    aut.check_dims(c)?;
    Ok(aut.colors(c).iter().any(|col| col.is_red()))
}

/// Oracle for [`class_injective`]: steps every labeling of the skeleton of
/// `c` and reports whether all images are distinct.
pub fn class_injective_bruteforce(aut: &FormulaAutomaton, c: &Configuration) -> Result<bool> {
    aut.check_dims(c)?;
    if c.len() > BRUTEFORCE_MAX_CELLS {
        return Err(Error::BudgetExceeded {
            what: "labelings",
            needed: format!("2^{}", c.len()),
            budget: format!("2^{BRUTEFORCE_MAX_CELLS}"),
        });
    }
    let total = 1u64 << c.len();
    let mut seen = vec![false; total as usize];
    for mask in 0..total {
        let img = aut.step(&c.with_label_mask(mask))?.label_mask() as usize;
        if std::mem::replace(&mut seen[img], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All preimages of `image` under `A_phi`: one if a red cell exists, and
/// none or two on the blue cycle class.
pub fn preimages(aut: &FormulaAutomaton, image: &Configuration) -> Result<Vec<Configuration>> {
    let d = decompose(aut, image)?;
    let y: Vec<bool> = image.labels().collect();
    let mut x = y.clone();
    for chain in &d.chains {
        // the red sink keeps its label; walk back toward the chain head
        for w in chain.windows(2).rev() {
            let (c, s) = (image.flat(w[0]), image.flat(w[1]));
            x[c] = y[c] ^ x[s];
        }
    }
    let Some(cycle) = d.cycle else {
        return Ok(vec![image.with_labels(x)]);
    };
    let flat: Vec<usize> = cycle.iter().map(|&p| image.flat(p)).collect();
    if flat.iter().fold(false, |acc, &k| acc ^ y[k]) {
        return Ok(Vec::new());
    }
    // x_c ^ x_suc(c) = y_c around the cycle, fixing x at the start to 0
    let mut cur = false;
    x[flat[0]] = false;
    for w in flat.windows(2) {
        cur ^= y[w[0]];
        x[w[1]] = cur;
    }
    let first = image.with_labels(x.iter().copied());
    let second = image.with_labels(x.iter().map(|b| !b));
    Ok(vec![first, second])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Injectivity {
    Injective,
    NonInjective { assignment: Assignment, witness: (Configuration, Configuration) },
}

impl Injectivity {
    pub fn is_injective(&self) -> bool {
        matches!(self, Injectivity::Injective)
    }
}

/// Decides injectivity of `A_phi` on bounded configurations by scanning
/// assignments; a satisfying assignment yields a verified collision.
pub fn decide_injectivity(phi: &CnfFormula) -> Result<Injectivity> {
    let phi = phi.normalize_odd();
    if phi.m() > DECIDE_MAX_VARS {
        return Err(Error::BudgetExceeded {
            what: "assignments",
            needed: format!("2^{}", phi.m()),
            budget: format!("2^{DECIDE_MAX_VARS}"),
        });
    }
    let Some(a) = phi.first_satisfying() else {
        return Ok(Injectivity::Injective);
    };
    let (c1, c2) = witness_pair(&phi, &a)?;
    let aut = FormulaAutomaton::new(&phi);
    if c1 == c2 || aut.step(&c1)? != aut.step(&c2)? {
        return Err(Error::Invariant(format!("witness for {a} does not collide")));
    }
    Ok(Injectivity::NonInjective { assignment: a, witness: (c1, c2) })
}

/// Draws uniformly random label-free skeletons and labels.
#[derive(Clone, Debug)]
pub struct ConfigSampler {
    n: usize,
    m: usize,
    skeletons: Vec<CellState>,
}

impl ConfigSampler {
    pub fn new(states: &StateSet) -> Self {
        ConfigSampler { n: states.n(), m: states.m(), skeletons: states.skeletons() }
    }

    fn cells(&self) -> usize {
        (self.n + 1) * (self.m + 2)
    }

    /// Each cell's skeleton uniform over the non-quiescent skeletons, labels 0.
    pub fn skeleton(&self, rng: &mut impl Rng) -> Configuration {
        let cells = (0..self.cells()).map(|_| *self.skeletons.choose(rng).expect("non-empty")).collect();
        Configuration::from_cells_unchecked(self.n, self.m, cells)
    }

    pub fn relabel(&self, c: &Configuration, rng: &mut impl Rng) -> Configuration {
        c.with_labels((0..c.len()).map(|_| rng.gen::<bool>()))
    }

    /// A uniformly random configuration over the states of `S_{n,m}`.
    pub fn configuration(&self, rng: &mut impl Rng) -> Configuration {
        let sk = self.skeleton(rng);
        self.relabel(&sk, rng)
    }

    /// `Table_phi(a)` for a uniform `a`, randomly relabeled and with
    /// `mutations` cells replaced by random states.
    pub fn near_table(&self, phi: &CnfFormula, mutations: usize, rng: &mut impl Rng) -> Configuration {
        let a = Assignment::new((0..phi.m()).map(|_| rng.gen()).collect());
        let t = build_table(phi, &a).expect("assignment length matches");
        let mut cells = self.relabel(&t, rng).cells().to_vec();
        for _ in 0..mutations {
            let k = rng.gen_range(0..cells.len());
            cells[k] = self.skeletons.choose(rng).expect("non-empty").with_label(rng.gen());
        }
        Configuration::from_cells_unchecked(self.n, self.m, cells)
    }
}

/// Randomized hunt for two configurations with the same image. Skeletons are
/// drawn uniformly or from computation tables; label pairs are random,
/// complementary or one bit apart.
pub fn collision_search(
    phi: &CnfFormula,
    trials: u64,
    seed: u64,
) -> Result<Option<(Configuration, Configuration)>> {
    let aut = FormulaAutomaton::new(phi);
    let phi = aut.formula();
    let sampler = ConfigSampler::new(aut.states());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let sk = if rng.gen_bool(0.5) { sampler.skeleton(&mut rng) } else { sampler.near_table(phi, 0, &mut rng) };
        let c1 = sampler.relabel(&sk, &mut rng);
        let c2 = match rng.gen_range(0..3) {
            0 => sampler.relabel(&sk, &mut rng),
            1 => sk.with_labels(c1.labels().map(|b| !b)),
            _ => {
                let k = rng.gen_range(0..sk.len());
                sk.with_labels(c1.labels().enumerate().map(|(i, b)| b ^ (i == k)))
            }
        };
        if c1 == c2 {
            continue;
        }
        if aut.step(&c1)? == aut.step(&c2)? {
            return Ok(Some((c1, c2)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{gen_onto_php, parse_dimacs};

    fn unit() -> FormulaAutomaton {
        FormulaAutomaton::new(&parse_dimacs("p cnf 1 1\n1 0").unwrap())
    }

    #[test]
    fn satisfying_table_is_one_cycle() {
        let aut = unit();
        let t = build_table(aut.formula(), &"1".parse().unwrap()).unwrap();
        let d = decompose(&aut, &t).unwrap();
        assert_eq!(d.cycle.as_ref().map(Vec::len), Some(6));
        assert!(d.chains.is_empty() && d.isolated.is_empty());
        assert!(!class_injective(&aut, &t).unwrap());
        assert!(!class_injective_bruteforce(&aut, &t).unwrap());
    }

    #[test]
    fn unsatisfying_table_is_a_chain_into_the_output() {
        let aut = unit();
        let t = build_table(aut.formula(), &"0".parse().unwrap()).unwrap();
        let d = decompose(&aut, &t).unwrap();
        assert!(d.cycle.is_none());
        assert_eq!(d.chains.len(), 1);
        assert_eq!(*d.chains[0].last().unwrap(), Coord::new(1, 2));
        assert_eq!(d.chains[0].len(), 6);
        assert!(class_injective(&aut, &t).unwrap());
        assert!(class_injective_bruteforce(&aut, &t).unwrap());
    }

    #[test]
    fn all_red_is_isolated_and_fixed() {
        let aut = unit();
        let cells = (0..6).map(|k| CellState::bare(Coord::new(1, 1), k % 2 == 0)).collect();
        let c = Configuration::new(1, 1, cells).unwrap();
        let d = decompose(&aut, &c).unwrap();
        assert_eq!(d.isolated.len(), 6);
        assert_eq!(aut.step(&c).unwrap(), c);
        assert!(class_injective_bruteforce(&aut, &c).unwrap());
    }

    #[test]
    fn preimages_recover_labels() {
        let aut = FormulaAutomaton::new(&parse_dimacs("p cnf 2 3\n1 2 0\n-1 0\n-2 0").unwrap());
        let sampler = ConfigSampler::new(aut.states());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..300 {
            let x = if k % 2 == 0 {
                sampler.configuration(&mut rng)
            } else {
                sampler.near_table(aut.formula(), k % 3, &mut rng)
            };
            let pre = preimages(&aut, &aut.step(&x).unwrap()).unwrap();
            assert_eq!(pre, vec![x]);
        }
    }

    #[test]
    fn cycle_class_has_zero_or_two_preimages() {
        let aut = unit();
        let t = build_table(aut.formula(), &"1".parse().unwrap()).unwrap();
        for mask in 0..64u64 {
            let y = t.with_label_mask(mask);
            let pre = preimages(&aut, &y).unwrap();
            assert_eq!(pre.len(), if mask.count_ones() % 2 == 0 { 2 } else { 0 });
            for x in pre {
                assert_eq!(aut.step(&x).unwrap(), y);
            }
        }
    }

    #[test]
    fn decisions() {
        assert!(decide_injectivity(&gen_onto_php(1)).unwrap().is_injective());
        match decide_injectivity(&parse_dimacs("p cnf 1 1\n1 0").unwrap()).unwrap() {
            Injectivity::NonInjective { assignment, .. } => assert_eq!(assignment.to_string(), "1"),
            Injectivity::Injective => panic!("(x1) is satisfiable"),
        }
    }

    #[test]
    fn collision_search_finds_unit_collision() {
        let (c1, c2) = collision_search(&parse_dimacs("p cnf 1 1\n1 0").unwrap(), 1000, 1).unwrap().unwrap();
        let aut = unit();
        assert_ne!(c1, c2);
        assert_eq!(aut.step(&c1).unwrap(), aut.step(&c2).unwrap());
    }
}
