//! Property checks against independent oracles on small instances.

use std::collections::HashSet;

use cellsat_core::analysis::{decompose, preimages, ConfigSampler};
use cellsat_core::inverse::{
    apply_inverse, build_refutation, check_inv_local, check_inverse_global, size_gate, structural_inverse, CheckMode,
    InverseAutomaton, Refutation,
};
use cellsat_core::translate::{pairing, unpair};
use cellsat_core::*;
use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_clauses() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        let lit = (1..=m as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        let clause = prop::collection::btree_map(1..=m as i64, lit, 1..=m)
            .prop_map(|mp| mp.into_values().collect::<Vec<i64>>())
            .prop_filter("no complementary pair", |c| {
                let s: HashSet<i64> = c.iter().copied().collect();
                c.iter().all(|l| !s.contains(&-l))
            });
        (Just(m), prop::collection::vec(clause, n))
    })
}

/// Satisfaction straight from the clause lists.
fn oracle_sat(clauses: &[Vec<i64>], a: &[bool]) -> bool {
    clauses.iter().all(|c| c.iter().any(|&l| a[l.unsigned_abs() as usize - 1] == (l > 0)))
}

fn all_locally_correct(aut: &FormulaAutomaton, c: &Configuration) -> bool {
    c.positions().all(|p| aut.is_locally_correct(c, p).is_ok())
}

/// Whether `c` is similar to the table of the assignment written in row 0.
fn is_table_like(phi: &CnfFormula, c: &Configuration) -> bool {
    let a: Option<Vec<bool>> = (1..=phi.m()).map(|j| c.at(Coord::new(0, j)).a).collect();
    let Some(a) = a else { return false };
    let t = build_table(phi, &Assignment::new(a)).unwrap();
    t.similar(c).unwrap()
}

fn mutate_component(s: CellState, rng: &mut ChaCha8Rng, n: usize, m: usize) -> CellState {
    let bit = |rng: &mut ChaCha8Rng| [None, Some(false), Some(true)][rng.gen_range(0..3)];
    let mut t = s;
    while t.skeleton() == s.skeleton() {
        t = s;
        match rng.gen_range(0..5) {
            0 => t.coord = Some(Coord::new(rng.gen_range(0..=n), rng.gen_range(0..=m + 1))),
            1 => t.flag = [None, Some(Polarity::Neg), Some(Polarity::Absent), Some(Polarity::Pos)][rng.gen_range(0..4)],
            2 => t.a = bit(rng),
            3 => t.pd = bit(rng),
            _ => t.pc = bit(rng),
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn satisfaction_matches_clause_oracle((m, clauses) in arb_clauses(), bits in any::<u64>()) {
        let phi = CnfFormula::from_clauses(m, &clauses).unwrap();
        let a: Vec<bool> = (0..m).map(|j| bits >> j & 1 == 1).collect();
        prop_assert_eq!(phi.is_satisfied(&Assignment::new(a.clone())).unwrap(), oracle_sat(&clauses, &a));
        let unsat_by_oracle = (0..1u64 << m).all(|x| !oracle_sat(&clauses, &(0..m).map(|j| x >> j & 1 == 1).collect::<Vec<_>>()));
        prop_assert_eq!(phi.first_satisfying().is_none(), unsat_by_oracle);
    }

    #[test]
    fn tables_are_fixed_points_and_blue_iff_satisfied((m, clauses) in arb_clauses(), bits in any::<u64>()) {
        let aut = FormulaAutomaton::new(&CnfFormula::from_clauses(m, &clauses).unwrap());
        let a: Vec<bool> = (0..m).map(|j| bits >> j & 1 == 1).collect();
        let t = build_table(aut.formula(), &Assignment::new(a.clone())).unwrap();
        prop_assert_eq!(aut.step(&t).unwrap(), t.clone());
        prop_assert!(all_locally_correct(&aut, &t));
        prop_assert_eq!(aut.colors(&t).iter().all(|c| c.is_blue()), oracle_sat(&clauses, &a));
    }

    /// Preimages computed along chains and cycles agree with exhaustive
    /// enumeration of labelings.
    #[test]
    fn preimages_match_enumeration(seed in any::<u64>()) {
        let aut = FormulaAutomaton::new(&parse_dimacs("p cnf 2 1\n1 -2 0").unwrap());
        let sampler = ConfigSampler::new(aut.states());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sk = if seed % 2 == 0 { sampler.skeleton(&mut rng) } else { sampler.near_table(aut.formula(), 0, &mut rng) };
        let y = sampler.relabel(&sk, &mut rng);
        let mut expected: Vec<Configuration> = (0..1u64 << sk.len())
            .map(|mask| sk.with_label_mask(mask))
            .filter(|x| aut.step(x).unwrap() == y)
            .collect();
        let mut got = preimages(&aut, &y).unwrap();
        expected.sort_by_key(|c| c.label_mask());
        got.sort_by_key(|c| c.label_mask());
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn step_preserves_skeleton_and_colors() {
    let aut = FormulaAutomaton::new(&parse_dimacs("p cnf 3 4\n1 0\n2 -3 0\n-1 -3 0\n1 2 0").unwrap());
    let sampler = ConfigSampler::new(aut.states());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..2000 {
        let c = if k % 2 == 0 { sampler.configuration(&mut rng) } else { sampler.near_table(aut.formula(), k % 4, &mut rng) };
        let d = aut.step(&c).unwrap();
        assert!(d.similar(&c).unwrap());
        assert_eq!(aut.colors(&c), aut.colors(&d));
        let dec = decompose(&aut, &c).unwrap();
        if dec.red_count() > 0 {
            assert!(dec.cycle.is_none());
        }
        for p in c.positions() {
            if aut.color(&c, p).is_blue() {
                aut.successor_of(&c, p).unwrap();
            }
        }
    }
}

/// A configuration is locally correct everywhere exactly when it is similar
/// to the table of the assignment in its row 0.
#[test]
fn local_correctness_characterizes_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let formulas = ["p cnf 1 1\n1 0", "p cnf 2 3\n1 2 0\n-1 0\n-2 1 0", "p cnf 3 1\n1 -2 3 0"];
    let mut correct = 0;
    for text in formulas {
        let aut = FormulaAutomaton::new(&parse_dimacs(text).unwrap());
        let phi = aut.formula();
        let (n, m) = aut.dims();
        for _ in 0..3000 {
            let a = Assignment::new((0..m).map(|_| rng.gen()).collect());
            let t = build_table(phi, &a).unwrap();
            let mut cells = t.cells().to_vec();
            for _ in 0..rng.gen_range(0..3) {
                let k = rng.gen_range(0..cells.len());
                cells[k] = mutate_component(cells[k], &mut rng, n, m);
            }
            let Ok(c) = Configuration::new(n, m, cells) else { continue };
            let lc = all_locally_correct(&aut, &c);
            assert_eq!(lc, is_table_like(phi, &c), "\n{}", c.to_text());
            correct += lc as usize;
            if lc {
                assert!(c.positions().all(|p| c.at(p).coord == Some(p)));
            }
        }
    }
    assert!(correct > 0);
}

#[test]
fn pairing_is_a_bijection_on_a_prefix() {
    let limit = 1_000_000u128;
    let mut seen = HashSet::new();
    for z in 0..limit {
        let (x, y) = unpair(z);
        assert_eq!(pairing(x as u64, y as u64), z);
        assert!(seen.insert((x, y)));
    }
}

fn contradiction() -> CnfFormula {
    parse_dimacs("p cnf 1 3\n1 0\n-1 0\n1 0").unwrap()
}

#[test]
fn local_and_global_checks_agree_on_structural_inverse() {
    let phi = contradiction();
    let aut = FormulaAutomaton::new(&phi);
    let b = structural_inverse(&phi).unwrap();
    let mode = CheckMode::Sampled { samples: 2000, seed: 1 };
    let t = size_gate(aut.states().len(), b.mu()) + BigUint::one();
    assert!(check_inv_local(&aut, &b, &t, mode).unwrap().holds());
    assert!(check_inverse_global(&aut, &b, mode).unwrap().counterexample.is_none());
    assert!(matches!(
        check_inverse_global(&aut, &b, CheckMode::Exhaustive { budget: 1 << 24 }),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn corrupted_row_fails_global_check() {
    let phi = contradiction();
    let aut = FormulaAutomaton::new(&phi);
    let mut b = build_refutation(&phi).unwrap().b;
    let (key, out) = b.rows().iter().next().map(|(k, &o)| (k.clone(), o)).unwrap();
    b.insert_row(key, (out + 1) % aut.states().len() as u32).unwrap();
    let rep = check_inverse_global(&aut, &b, CheckMode::Sampled { samples: 10_000, seed: 2 }).unwrap();
    let x = rep.counterexample.expect("corrupted row is hit");
    assert_ne!(apply_inverse(&b, &aut.step(&x).unwrap()).unwrap(), x);
}

#[test]
fn identity_inverts_all_red_configurations() {
    let aut = FormulaAutomaton::new(&contradiction());
    let b = InverseAutomaton::identity(aut.states().clone());
    let sampler = ConfigSampler::new(aut.states());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut all_red = 0;
    for _ in 0..5000 {
        let x = sampler.configuration(&mut rng);
        if aut.colors(&x).iter().all(|c| c.is_red()) {
            all_red += 1;
            assert_eq!(apply_inverse(&b, &aut.step(&x).unwrap()).unwrap(), x);
        }
    }
    assert!(all_red > 0);
}

#[test]
fn structural_inverse_exists_for_every_unsat_micro_formula() {
    for text in ["p cnf 1 2\n1 0\n-1 0", "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0"] {
        let phi = parse_dimacs(text).unwrap();
        let aut = FormulaAutomaton::new(&phi);
        let b = structural_inverse(&phi).unwrap();
        let t = size_gate(aut.states().len(), b.mu()) + BigUint::one();
        assert!(check_inv_local(&aut, &b, &t, CheckMode::Sampled { samples: 1000, seed: 3 }).unwrap().holds());
    }
}

#[test]
fn truncated_refutation_is_malformed() {
    let bytes = build_refutation(&contradiction()).unwrap().to_bytes();
    for cut in [bytes.len() - 1, bytes.len() / 2, 10] {
        assert!(Refutation::parse(&bytes[..cut]).is_err());
    }
}
