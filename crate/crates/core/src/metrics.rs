//! Clustering quality metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::{squared_distance, ClusterRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub inertia: f64,
    pub silhouette: f64,
    /// Label-based scores; absent when no ground truth is available.
    pub homogeneity: Option<f64>,
    pub completeness: Option<f64>,
    pub v_measure: Option<f64>,
    pub n_iter: usize,
}

impl MetricReport {
    /// Scores a finished k-means run.
    pub fn from_run(
        data: &[Vec<f64>],
        run: &ClusterRun,
        true_labels: Option<&[usize]>,
    ) -> Result<Self> {
        let (h, c, v) = match true_labels {
            Some(t) => {
                let (h, c, v) = homogeneity_completeness_v(t, &run.labels)?;
                (Some(h), Some(c), Some(v))
            }
            None => (None, None, None),
        };
        Ok(Self {
            inertia: inertia(data, &run.labels, &run.final_centroids)?,
            silhouette: silhouette(data, &run.labels)?,
            homogeneity: h,
            completeness: c,
            v_measure: v,
            n_iter: run.n_iter,
        })
    }

    /// `(name, value)` pairs in a fixed order, skipping absent scores.
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![("inertia", self.inertia), ("silhouette", self.silhouette)];
        for (name, v) in [
            ("homogeneity", self.homogeneity),
            ("completeness", self.completeness),
            ("v_measure", self.v_measure),
        ] {
            if let Some(v) = v {
                out.push((name, v));
            }
        }
        out.push(("n_iter", self.n_iter as f64));
        out
    }
}

/// Within-cluster sum of squared distances.
pub fn inertia(data: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> Result<f64> {
    if data.len() != labels.len() {
        return Err(Error::Dimension {
            expected: data.len(),
            found: labels.len(),
        });
    }
    let mut total = 0.0;
    for (x, &l) in data.iter().zip(labels) {
        let c = centroids.get(l).ok_or(Error::IndexOutOfRange {
            index: l,
            num_vars: centroids.len(),
        })?;
        if c.len() != x.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                found: c.len(),
            });
        }
        total += squared_distance(x, c);
    }
    Ok(total)
}

/// Mean silhouette coefficient with Euclidean distances. Points in
/// singleton clusters score 0, as does `0 / 0`.
pub fn silhouette(data: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if data.len() != labels.len() {
        return Err(Error::Dimension {
            expected: data.len(),
            found: labels.len(),
        });
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        members.entry(l).or_default().push(i);
    }
    if members.len() < 2 {
        return Err(Error::UndefinedMetric(
            "silhouette needs at least two clusters".into(),
        ));
    }
    let n = data.len();
    let mut total = 0.0;
    for i in 0..n {
        let own = &members[&labels[i]];
        if own.len() == 1 {
            continue;
        }
        let mean_dist = |idx: &[usize]| {
            idx.iter()
                .map(|&j| squared_distance(&data[i], &data[j]).sqrt())
                .sum::<f64>()
        };
        let a = mean_dist(own) / (own.len() - 1) as f64;
        let b = members
            .iter()
            .filter(|(&l, _)| l != labels[i])
            .map(|(_, idx)| mean_dist(idx) / idx.len() as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Homogeneity, completeness and V-measure (harmonic mean), natural-log
/// entropies.
pub fn homogeneity_completeness_v(
    true_labels: &[usize],
    pred_labels: &[usize],
) -> Result<(f64, f64, f64)> {
    if true_labels.len() != pred_labels.len() {
        return Err(Error::Dimension {
            expected: true_labels.len(),
            found: pred_labels.len(),
        });
    }
    if true_labels.is_empty() {
        return Err(Error::UndefinedMetric("no samples".into()));
    }
    let n = true_labels.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut classes: BTreeMap<usize, usize> = BTreeMap::new();
    let mut clusters: BTreeMap<usize, usize> = BTreeMap::new();
    for (&c, &k) in true_labels.iter().zip(pred_labels) {
        *joint.entry((c, k)).or_insert(0) += 1;
        *classes.entry(c).or_insert(0) += 1;
        *clusters.entry(k).or_insert(0) += 1;
    }
    let h_c = entropy(classes.values().copied(), n);
    let h_k = entropy(clusters.values().copied(), n);
    let mut h_c_given_k = 0.0;
    let mut h_k_given_c = 0.0;
    for (&(c, k), &n_ck) in &joint {
        let p = n_ck as f64 / n;
        h_c_given_k -= p * (n_ck as f64 / clusters[&k] as f64).ln();
        h_k_given_c -= p * (n_ck as f64 / classes[&c] as f64).ln();
    }
    let h = if h_c == 0.0 {
        1.0
    } else {
        1.0 - h_c_given_k / h_c
    };
    let c = if h_k == 0.0 {
        1.0
    } else {
        1.0 - h_k_given_c / h_k
    };
    let v = if h + c == 0.0 {
        0.0
    } else {
        2.0 * h * c / (h + c)
    };
    Ok((h, c, v))
}
