#![allow(dead_code)]

use aqoci_core::rng::SeededRng;
use aqoci_core::QuboProblem;

/// Dense random QUBO with coefficients uniform in [-1, 1).
pub fn random_qubo(n: usize, seed: u64) -> QuboProblem {
    let mut rng = SeededRng::new(seed);
    let mut q = QuboProblem::new(n);
    for i in 0..n {
        q.add_linear(i, 2.0 * rng.next_f64() - 1.0).unwrap();
        for j in i + 1..n {
            q.add_quadratic(i, j, 2.0 * rng.next_f64() - 1.0).unwrap();
        }
    }
    q
}

/// Energy from a dense upper-triangular matrix, independent of the
/// library's sparse evaluation.
pub fn dense_energy(q: &QuboProblem, x: &[u8]) -> f64 {
    let n = q.num_vars();
    let mut m = vec![vec![0.0; n]; n];
    for (&i, &c) in q.linear() {
        m[i][i] += c;
    }
    for (&(i, j), &c) in q.quadratic() {
        m[i][j] += c;
    }
    let mut e = q.constant();
    for i in 0..n {
        for j in i..n {
            e += m[i][j] * (x[i] * x[j]) as f64;
        }
    }
    e
}

/// Exhaustive minimum energy by plain enumeration.
pub fn exhaustive_min(q: &QuboProblem) -> f64 {
    let n = q.num_vars();
    (0u64..1 << n)
        .map(|code| {
            let x: Vec<u8> = (0..n).map(|i| ((code >> (n - 1 - i)) & 1) as u8).collect();
            dense_energy(q, &x)
        })
        .fold(f64::INFINITY, f64::min)
}
