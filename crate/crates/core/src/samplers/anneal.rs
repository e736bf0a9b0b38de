//! Single-flip Metropolis simulated annealing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SampleSet, SampleSource};
use crate::error::{Error, Result};
use crate::qubo::{BitVector, QuboProblem, SparseQubo};
use crate::rng::{child_seed, SeededRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub num_reads: usize,
    pub sweeps: usize,
    /// Defaults to `0.1 / sigma` with `sigma` the largest absolute coefficient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_start: Option<f64>,
    /// Defaults to `10 / sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_end: Option<f64>,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            num_reads: 32,
            sweeps: 1000,
            beta_start: None,
            beta_end: None,
            seed: 0,
        }
    }
}

impl AnnealConfig {
    /// Inverse-temperature endpoints for `problem`.
    pub fn beta_range(&self, problem: &QuboProblem) -> Result<(f64, f64)> {
        let sigma = problem.max_abs_coefficient();
        let sigma = if sigma > 0.0 { sigma } else { 1.0 };
        let start = self.beta_start.unwrap_or(0.1 / sigma);
        let end = self.beta_end.unwrap_or(10.0 / sigma);
        if !(start > 0.0 && end > start && end.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < beta_start < beta_end, got {start} and {end}"
            )));
        }
        Ok((start, end))
    }

    fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.sweeps == 0 {
            return Err(Error::Config(
                "num_reads and sweeps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Geometric inverse-temperature ladder with `sweeps` rungs.
fn schedule(start: f64, end: f64, sweeps: usize) -> Vec<f64> {
    if sweeps == 1 {
        return vec![end];
    }
    let ratio = (end / start).powf(1.0 / (sweeps - 1) as f64);
    (0..sweeps).map(|s| start * ratio.powi(s as i32)).collect()
}

fn anneal_read(sparse: &SparseQubo, betas: &[f64], seed: u64) -> BitVector {
    let n = sparse.num_vars();
    let mut rng = SeededRng::new(seed);
    let mut x: Vec<u8> = (0..n).map(|_| rng.next_bit()).collect();
    let mut fields = sparse.local_fields(&x);
    for &beta in betas {
        for i in 0..n {
            let delta = if x[i] == 0 { fields[i] } else { -fields[i] };
            // A uniform is drawn only for uphill proposals.
            if delta <= 0.0 || rng.next_f64() < (-beta * delta).exp() {
                sparse.flip(&mut x, &mut fields, i);
            }
        }
    }
    BitVector::new(x)
}

/// Runs `num_reads` independent anneals; read `r` uses the child seed
/// `seed ^ r`. Each sweep proposes every single-bit flip in index order.
pub fn simulated_annealing(problem: &QuboProblem, config: &AnnealConfig) -> Result<SampleSet> {
    config.validate()?;
    if problem.num_vars() == 0 {
        return Err(Error::Config("problem has no variables".into()));
    }
    let (start, end) = config.beta_range(problem)?;
    let betas = schedule(start, end, config.sweeps);
    let sparse = SparseQubo::new(problem);
    let reads: Vec<BitVector> = (0..config.num_reads as u64)
        .into_par_iter()
        .map(|r| anneal_read(&sparse, &betas, child_seed(config.seed, r)))
        .collect();
    SampleSet::from_assignments(problem, reads, SampleSource::Anneal)
}
