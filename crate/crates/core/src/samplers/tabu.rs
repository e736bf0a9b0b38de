//! Multistart tabu search over single-bit flips.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SampleSet, SampleSource};
use crate::error::{Error, Result};
use crate::qubo::{BitVector, QuboProblem, SparseQubo};
use crate::rng::{child_seed, SeededRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuConfig {
    pub restarts: usize,
    /// Defaults to `max(4, n / 10)`; clamped to `n - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tenure: Option<usize>,
    /// Defaults to `2 n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_no_improve: Option<usize>,
    pub seed: u64,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            tenure: None,
            max_no_improve: None,
            seed: 0,
        }
    }
}

impl TabuConfig {
    /// `(tenure, max_no_improve)` for a problem with `n` variables.
    pub fn resolve(&self, n: usize) -> (usize, usize) {
        let mut tenure = self.tenure.unwrap_or_else(|| (n / 10).max(4));
        if tenure >= n {
            if self.tenure.is_some() {
                log::warn!(
                    "tabu tenure {tenure} clamped to {} for {n} variables",
                    n - 1
                );
            }
            tenure = n - 1;
        }
        let max_no_improve = self.max_no_improve.unwrap_or(2 * n).max(1);
        (tenure, max_no_improve)
    }
}

fn tabu_restart(
    sparse: &SparseQubo,
    problem: &QuboProblem,
    tenure: usize,
    max_no_improve: usize,
    seed: u64,
) -> BitVector {
    let n = sparse.num_vars();
    let eps = 1e-12 * (1.0 + problem.max_abs_coefficient());
    let mut rng = SeededRng::new(seed);
    let mut x: Vec<u8> = (0..n).map(|_| rng.next_bit()).collect();
    let mut fields = sparse.local_fields(&x);
    let mut current = problem.energy_unchecked(&x);
    let mut best = current;
    let mut best_x = x.clone();
    // Iteration index until which each variable stays tabu.
    let mut tabu_until = vec![0usize; n];
    let mut stale = 0;
    let mut iter = 0usize;

    while stale < max_no_improve {
        iter += 1;
        let mut choice: Option<(usize, f64)> = None;
        for i in 0..n {
            let delta = if x[i] == 0 { fields[i] } else { -fields[i] };
            let allowed = tabu_until[i] < iter || current + delta < best - eps;
            if allowed && choice.is_none_or(|(_, d)| delta < d) {
                choice = Some((i, delta));
            }
        }
        let Some((i, delta)) = choice else {
            break;
        };
        sparse.flip(&mut x, &mut fields, i);
        current += delta;
        tabu_until[i] = iter + tenure;
        if current < best - eps {
            best = current;
            best_x.copy_from_slice(&x);
            stale = 0;
        } else {
            stale += 1;
        }
    }
    BitVector::new(best_x)
}

/// Restart `r` starts from a uniform random assignment drawn from child
/// seed `seed ^ r`; each move takes the best admissible single flip. A tabu
/// flip is admissible when it would improve on the restart's best energy.
pub fn tabu_search(problem: &QuboProblem, config: &TabuConfig) -> Result<SampleSet> {
    let n = problem.num_vars();
    if n == 0 {
        return Err(Error::Config("problem has no variables".into()));
    }
    if config.restarts == 0 {
        return Err(Error::Config("restarts must be positive".into()));
    }
    let (tenure, max_no_improve) = config.resolve(n);
    let sparse = SparseQubo::new(problem);
    let bests: Vec<BitVector> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|r| {
            tabu_restart(
                &sparse,
                problem,
                tenure,
                max_no_improve,
                child_seed(config.seed, r),
            )
        })
        .collect();
    SampleSet::from_assignments(problem, bests, SampleSource::Tabu)
}
