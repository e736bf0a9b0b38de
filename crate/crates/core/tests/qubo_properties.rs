mod common;

use aqoci_core::qubo::bits_to_spins;
use aqoci_core::{BitVector, QuboProblem};
use common::{dense_energy, exhaustive_min, random_qubo};
use proptest::prelude::*;

fn qubo_strategy(max_vars: usize) -> impl Strategy<Value = QuboProblem> {
    (1..=max_vars).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n * n),
            -5.0f64..5.0,
        )
            .prop_map(move |(lin, quad, c)| {
                let mut q = QuboProblem::new(n);
                for (i, v) in lin.iter().enumerate() {
                    q.add_linear(i, *v).unwrap();
                }
                for i in 0..n {
                    for j in i + 1..n {
                        q.add_quadratic(i, j, quad[i * n + j]).unwrap();
                    }
                }
                q.add_constant(c).unwrap();
                q
            })
    })
}

proptest! {
    #[test]
    fn ising_energies_agree(q in qubo_strategy(12), code in any::<u64>()) {
        let n = q.num_vars();
        let x = BitVector::from_code(code & ((1 << n) - 1), n);
        let ising = q.to_ising();
        let e = q.energy(&x).unwrap();
        let s = ising.energy(&bits_to_spins(&x)).unwrap();
        prop_assert!((e - s).abs() <= 1e-9 * (1.0 + e.abs()));
    }

    #[test]
    fn json_round_trip_is_exact(q in qubo_strategy(10)) {
        let back = QuboProblem::from_json(&q.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn energy_matches_dense_evaluation(q in qubo_strategy(10), code in any::<u64>()) {
        let n = q.num_vars();
        let x = BitVector::from_code(code & ((1 << n) - 1), n);
        prop_assert!((q.energy(&x).unwrap() - dense_energy(&q, x.as_slice())).abs() < 1e-9);
    }

    #[test]
    fn scaling_scales_energy(q in qubo_strategy(8), f in 0.1f64..10.0, code in any::<u64>()) {
        let n = q.num_vars();
        let x = BitVector::from_code(code & ((1 << n) - 1), n);
        let e = q.energy(&x).unwrap();
        let scaled = q.scaled(f).energy(&x).unwrap();
        prop_assert!((scaled - f * e).abs() <= 1e-9 * (1.0 + scaled.abs()));
    }
}

#[test]
fn brute_force_matches_plain_enumeration() {
    for seed in 0..20 {
        let q = random_qubo(3 + (seed as usize % 12), seed);
        let (best, e) = q.brute_force_minimum().unwrap();
        assert!((e - exhaustive_min(&q)).abs() < 1e-12, "seed {seed}");
        assert_eq!(q.energy(&best).unwrap(), e);
    }
}

#[test]
fn brute_force_tie_break_is_lexicographic() {
    // Two symmetric minima at 01 and 10: the smaller string wins.
    let mut q = QuboProblem::new(2);
    q.add_linear(0, -1.0).unwrap();
    q.add_linear(1, -1.0).unwrap();
    q.add_quadratic(0, 1, 2.0).unwrap();
    let (best, e) = q.brute_force_minimum().unwrap();
    assert_eq!((best.to_string(), e), ("01".to_string(), -1.0));
}
