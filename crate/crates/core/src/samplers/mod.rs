//! Heuristic and exact QUBO samplers with a uniform output type.

mod anneal;
mod remote;
mod stub;
mod tabu;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{BitVector, QuboProblem};

pub use anneal::{simulated_annealing, AnnealConfig};
pub use remote::{remote_hybrid, RemoteSolverConfig, SOLVER_TOKEN_ENV};
pub use stub::{records_json, StubRequest, StubServer};
pub use tabu::{tabu_search, TabuConfig};

/// Where a [`SampleSet`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Anneal,
    Tabu,
    Oracle,
    Remote,
    /// Remote endpoint unreachable; produced by the local annealer.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub assignment: BitVector,
    pub energy: f64,
    pub occurrences: u64,
}

/// Distinct assignments sorted by energy, then lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    records: Vec<SampleRecord>,
    pub source: SampleSource,
}

fn canonical(a: &SampleRecord, b: &SampleRecord) -> Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then_with(|| a.assignment.cmp(&b.assignment))
}

impl SampleSet {
    /// Evaluates, merges duplicates and sorts `assignments`.
    pub fn from_assignments(
        problem: &QuboProblem,
        assignments: impl IntoIterator<Item = BitVector>,
        source: SampleSource,
    ) -> Result<Self> {
        Self::from_counts(problem, assignments.into_iter().map(|a| (a, 1)), source)
    }

    pub(crate) fn from_counts(
        problem: &QuboProblem,
        counted: impl IntoIterator<Item = (BitVector, u64)>,
        source: SampleSource,
    ) -> Result<Self> {
        let mut merged: BTreeMap<BitVector, u64> = BTreeMap::new();
        for (a, n) in counted {
            *merged.entry(a).or_insert(0) += n;
        }
        let mut records = merged
            .into_iter()
            .map(|(assignment, occurrences)| {
                let energy = problem.energy(&assignment)?;
                Ok(SampleRecord {
                    assignment,
                    energy,
                    occurrences,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        records.sort_by(canonical);
        Ok(Self { records, source })
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn best(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    pub fn total_occurrences(&self) -> u64 {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    /// Occurrence-weighted mean of each variable.
    pub fn marginals(&self) -> Vec<f64> {
        let n = self.records.first().map_or(0, |r| r.assignment.len());
        let total = self.total_occurrences() as f64;
        let mut out = vec![0.0; n];
        for r in &self.records {
            for (m, &b) in out.iter_mut().zip(r.assignment.as_slice()) {
                *m += (b as u64 * r.occurrences) as f64;
            }
        }
        if total > 0.0 {
            out.iter_mut().for_each(|m| *m /= total);
        }
        out
    }

    /// Checks stored energies against `problem` and the canonical order.
    pub fn validate(&self, problem: &QuboProblem) -> Result<()> {
        for (i, r) in self.records.iter().enumerate() {
            let e = problem.energy(&r.assignment)?;
            if (e - r.energy).abs() > 1e-9 {
                return Err(Error::EnergyMismatch {
                    record: i,
                    reported: r.energy,
                    computed: e,
                });
            }
        }
        if self
            .records
            .windows(2)
            .any(|w| canonical(&w[0], &w[1]) != Ordering::Less)
        {
            return Err(Error::Decode("sample set is not canonically sorted".into()));
        }
        Ok(())
    }
}

/// Exhaustive sampler: a single record holding the oracle minimum.
pub fn oracle_sample(problem: &QuboProblem) -> Result<SampleSet> {
    let (best, _) = problem.brute_force_minimum()?;
    SampleSet::from_assignments(problem, [best], SampleSource::Oracle)
}

/// Sampler selection for the refinement loop and benchmark harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplerChoice {
    Anneal(AnnealConfig),
    Tabu(TabuConfig),
    Remote(RemoteSolverConfig),
    Oracle,
}

impl SamplerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Anneal(_) => "sa",
            Self::Tabu(_) => "tabu",
            Self::Remote(_) => "remote",
            Self::Oracle => "oracle",
        }
    }

    /// Samples `problem`, replacing the configured seed with `seed` where
    /// the sampler is randomized.
    pub fn sample(&self, problem: &QuboProblem, seed: Option<u64>) -> Result<SampleSet> {
        match self {
            Self::Anneal(cfg) => {
                let cfg = AnnealConfig {
                    seed: seed.unwrap_or(cfg.seed),
                    ..cfg.clone()
                };
                simulated_annealing(problem, &cfg)
            }
            Self::Tabu(cfg) => {
                let cfg = TabuConfig {
                    seed: seed.unwrap_or(cfg.seed),
                    ..cfg.clone()
                };
                tabu_search(problem, &cfg)
            }
            Self::Remote(cfg) => remote_hybrid(problem, cfg),
            Self::Oracle => oracle_sample(problem),
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::qubo::QuboProblem;
    use crate::rng::SeededRng;

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
}
