//! Shared fixtures for the criterion benchmarks.

use aqoci_core::formulation::{assemble, CentroidProblem};
use aqoci_core::refine::initialize_state;
use aqoci_core::rng::SeededRng;
use aqoci_core::{make_blobs, QuboProblem, WeightGrid};

/// Dense QUBO with coefficients uniform in `[-1, 1)`.
pub fn random_qubo(n: usize, seed: u64) -> QuboProblem {
    let mut rng = SeededRng::new(seed);
    let mut q = QuboProblem::new(n);
    for i in 0..n {
        q.add_linear(i, 2.0 * rng.next_f64() - 1.0)
            .expect("index in range");
        for j in i + 1..n {
            q.add_quadratic(i, j, 2.0 * rng.next_f64() - 1.0)
                .expect("index in range");
        }
    }
    q
}

/// First-round centroid QUBO for `n` blob samples in two dimensions.
pub fn centroid_qubo(n: usize, k: usize, bits: u32) -> QuboProblem {
    let data = make_blobs(n, k, 0, 1.0)
        .expect("valid blob parameters")
        .points;
    let grid = WeightGrid::unsigned(bits).expect("valid bit width");
    let mut problem = CentroidProblem::new(data, k, grid).expect("valid problem");
    let state = initialize_state(7.0, -8.0, bits, problem.num_weights(), 2.0).expect("valid grid");
    let entries = state.entries();
    problem.certify_delta1(&entries).expect("finite bound");
    assemble(&problem, &entries).expect("assembles").0
}
