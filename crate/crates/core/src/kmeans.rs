//! Lloyd's k-means with pluggable seeding.
//!
//! Distances are squared Euclidean. A run stops when an assignment step
//! reproduces the previous labels or an update step leaves every centroid
//! bit-for-bit unchanged (after which the next assignment would repeat).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    RandomObservations { seed: u64 },
    Provided(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iterations: usize,
    pub init: Init,
}

impl KMeansConfig {
    pub fn new(k: usize, init: Init) -> Self {
        Self {
            k,
            max_iterations: 300,
            init,
        }
    }
}

/// Record of one k-means execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRun {
    pub seed_centroids: Vec<Vec<f64>>,
    pub final_centroids: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub inertia: f64,
    pub n_iter: usize,
    pub converged: bool,
    /// Inertia after each assignment step.
    pub inertia_trace: Vec<f64>,
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid per point; ties go to the lowest index.
pub fn assignment_step(data: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    data.iter()
        .map(|x| {
            let mut best = (0, f64::INFINITY);
            for (i, c) in centroids.iter().enumerate() {
                let d = squared_distance(x, c);
                if d < best.1 {
                    best = (i, d);
                }
            }
            best.0
        })
        .collect()
}

fn means(data: &[Vec<f64>], labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = data.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in data.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(x) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|v| *v /= c as f64);
        }
    }
    (sums, counts)
}

/// Cluster means for `labels`.
///
/// Each empty cluster (in index order) adopts the point farthest from its
/// own cluster mean, taken from a cluster that keeps at least one member;
/// `labels` is updated accordingly before the means are recomputed.
pub fn update_step(data: &[Vec<f64>], labels: &mut [usize], k: usize) -> Vec<Vec<f64>> {
    let (mut centroids, mut counts) = means(data, labels, k);
    if counts.iter().all(|&c| c > 0) {
        return centroids;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut pick: Option<(usize, f64)> = None;
        for (p, x) in data.iter().enumerate() {
            let l = labels[p];
            if counts[l] < 2 {
                continue;
            }
            let d = squared_distance(x, &centroids[l]);
            if pick.is_none_or(|(_, best)| d > best) {
                pick = Some((p, d));
            }
        }
        let Some((p, _)) = pick else {
            break;
        };
        counts[labels[p]] -= 1;
        labels[p] = empty;
        counts[empty] = 1;
        centroids[empty] = data[p].clone();
    }
    means(data, labels, k).0
}

pub fn inertia_of(data: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    data.iter()
        .zip(labels)
        .map(|(x, &l)| squared_distance(x, &centroids[l]))
        .sum()
}

/// `k` distinct observations chosen by a partial Fisher-Yates shuffle.
pub fn random_init(data: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    Ok(random_indices(n, k, seed)
        .into_iter()
        .map(|i| data[i].clone())
        .collect())
}

pub fn random_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = SeededRng::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below((n - i) as u32) as usize;
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

pub fn lloyd(data: &[Vec<f64>], config: &KMeansConfig) -> Result<ClusterRun> {
    let k = config.k;
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if config.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be positive".into()));
    }
    let dim = data[0].len();
    if let Some(bad) = data.iter().find(|x| x.len() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            found: bad.len(),
        });
    }
    let seed_centroids = match &config.init {
        Init::RandomObservations { seed } => random_init(data, k, *seed)?,
        Init::Provided(c) => {
            if c.len() != k {
                return Err(Error::Dimension {
                    expected: k,
                    found: c.len(),
                });
            }
            if let Some(bad) = c.iter().find(|m| m.len() != dim) {
                return Err(Error::Dimension {
                    expected: dim,
                    found: bad.len(),
                });
            }
            if c.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Config("seed centroids must be finite".into()));
            }
            c.clone()
        }
    };

    let mut centroids = seed_centroids.clone();
    let mut previous: Option<Vec<usize>> = None;
    let mut inertia_trace = Vec::new();
    let mut n_iter = 0;
    let mut converged = false;
    let mut labels = Vec::new();
    for it in 1..=config.max_iterations {
        n_iter = it;
        labels = assignment_step(data, &centroids);
        inertia_trace.push(inertia_of(data, &labels, &centroids));
        if previous.as_ref() == Some(&labels) {
            converged = true;
            break;
        }
        let updated = update_step(data, &mut labels, k);
        if updated == centroids {
            converged = true;
            break;
        }
        centroids = updated;
        previous = Some(labels.clone());
    }
    if !converged {
        labels = assignment_step(data, &centroids);
    }
    let inertia = inertia_of(data, &labels, &centroids);
    Ok(ClusterRun {
        seed_centroids,
        final_centroids: centroids,
        labels,
        inertia,
        n_iter,
        converged,
        inertia_trace,
    })
}
