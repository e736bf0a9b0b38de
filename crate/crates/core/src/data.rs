//! Dataset provisioning: Gaussian blobs, CSV ingestion and PCA.
//!
//! Points are stored sample-major: `points[j]` is the j-th observation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::random_indices;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Blobs {
        seed: u64,
        k: usize,
        n: usize,
        std: f64,
    },
    Csv {
        path: PathBuf,
    },
    CsvPca {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub true_labels: Option<Vec<usize>>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// First `m` samples.
    pub fn head(&self, m: usize) -> Result<Dataset> {
        if m == 0 || m > self.len() {
            return Err(Error::Config(format!(
                "sample size {m} outside 1..={}",
                self.len()
            )));
        }
        Ok(Dataset {
            points: self.points[..m].to_vec(),
            true_labels: self.true_labels.as_ref().map(|l| l[..m].to_vec()),
            provenance: self.provenance.clone(),
        })
    }

    /// `m` samples drawn uniformly without replacement, in draw order.
    pub fn subsample(&self, m: usize, seed: u64) -> Result<Dataset> {
        if m == 0 || m > self.len() {
            return Err(Error::Config(format!(
                "sample size {m} outside 1..={}",
                self.len()
            )));
        }
        let idx = random_indices(self.len(), m, seed);
        Ok(Dataset {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            true_labels: self
                .true_labels
                .as_ref()
                .map(|l| idx.iter().map(|&i| l[i]).collect()),
            provenance: self.provenance.clone(),
        })
    }

    /// Per-feature z-scores (sample standard deviation). Constant features
    /// are only centred.
    pub fn standardize(&self) -> Dataset {
        let n = self.len() as f64;
        let d = self.dim();
        let mut out = self.points.clone();
        for f in 0..d {
            let mean = self.points.iter().map(|x| x[f]).sum::<f64>() / n;
            let var = if self.len() > 1 {
                self.points
                    .iter()
                    .map(|x| (x[f] - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0)
            } else {
                0.0
            };
            let sd = var.sqrt();
            for x in &mut out {
                x[f] -= mean;
                if sd > 0.0 {
                    x[f] /= sd;
                }
            }
        }
        Dataset {
            points: out,
            true_labels: self.true_labels.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Isotropic Gaussian blobs around `k` centers drawn from `[-10, 10]^2`.
/// Point `i` belongs to center `i % k`.
pub fn make_blobs(n: usize, k: usize, seed: u64, std: f64) -> Result<Dataset> {
    if k == 0 || n < k {
        return Err(Error::Config(format!(
            "need n >= k >= 1, got n = {n}, k = {k}"
        )));
    }
    if !(std.is_finite() && std >= 0.0) {
        return Err(Error::Config(format!(
            "std must be finite and non-negative, got {std}"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let centers: Vec<[f64; 2]> = (0..k)
        .map(|_| {
            let x = -10.0 + 20.0 * rng.next_f64();
            let y = -10.0 + 20.0 * rng.next_f64();
            [x, y]
        })
        .collect();
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = centers[i % k];
        let dx = rng.standard_normal();
        let dy = rng.standard_normal();
        points.push(vec![c[0] + std * dx, c[1] + std * dy]);
        labels.push(i % k);
    }
    Ok(Dataset {
        points,
        true_labels: Some(labels),
        provenance: Provenance::Blobs { seed, k, n, std },
    })
}

/// Blob centers for the given seed, in the order `make_blobs` draws them.
pub fn blob_centers(k: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = SeededRng::new(seed);
    (0..k)
        .map(|_| {
            let x = -10.0 + 20.0 * rng.next_f64();
            let y = -10.0 + 20.0 * rng.next_f64();
            [x, y]
        })
        .collect()
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads comma-separated numeric rows; a non-numeric first row is a header.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(i as u64 + 1, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                    return Err(parse_error(line, format!("non-finite value {bad}")));
                }
                if let Some(first) = points.first() {
                    if first.len() != row.len() {
                        return Err(parse_error(
                            line,
                            format!("expected {} fields, found {}", first.len(), row.len()),
                        ));
                    }
                }
                points.push(row);
            }
            Err(_) if i == 0 => continue,
            Err(_) => {
                let cell = record
                    .iter()
                    .find(|c| c.trim().parse::<f64>().is_err())
                    .unwrap_or_default();
                return Err(parse_error(line, format!("non-numeric cell {cell:?}")));
            }
        }
    }
    if points.is_empty() {
        return Err(parse_error(1, "no data rows"));
    }
    Ok(Dataset {
        points,
        true_labels: None,
        provenance: Provenance::Csv {
            path: path.to_path_buf(),
        },
    })
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues and eigenvectors (as columns of the second matrix).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = a.len();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < 1e-10 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for (k, (&apk, &aqk)) in rp.iter().zip(&rq).enumerate() {
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| a[i][i]).collect(), v)
}

/// Projects onto the top two principal components. Each component's
/// largest-magnitude loading is made positive.
pub fn pca_2d(dataset: &Dataset) -> Result<Dataset> {
    let d = dataset.dim();
    let n = dataset.len();
    if d < 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: d,
        });
    }
    if n < 2 {
        return Err(Error::Config("pca needs at least two samples".into()));
    }
    let mean: Vec<f64> = (0..d)
        .map(|f| dataset.points.iter().map(|x| x[f]).sum::<f64>() / n as f64)
        .collect();
    let centred: Vec<Vec<f64>> = dataset
        .points
        .iter()
        .map(|x| x.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for x in &centred {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += x[i] * x[j];
            }
        }
    }
    cov.iter_mut().flatten().for_each(|c| *c /= (n - 1) as f64);
    let (values, vectors) = jacobi_eigen(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let components: Vec<Vec<f64>> = order[..2]
        .iter()
        .map(|&c| {
            let mut col: Vec<f64> = vectors.iter().map(|row| row[c]).collect();
            let lead = col
                .iter()
                .copied()
                .enumerate()
                .fold((0, 0.0f64), |best, (i, v)| {
                    if v.abs() > best.1.abs() {
                        (i, v)
                    } else {
                        best
                    }
                })
                .1;
            if lead < 0.0 {
                col.iter_mut().for_each(|v| *v = -*v);
            }
            col
        })
        .collect();
    let points = centred
        .iter()
        .map(|x| {
            components
                .iter()
                .map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let provenance = match &dataset.provenance {
        Provenance::Csv { path } | Provenance::CsvPca { path } => {
            Provenance::CsvPca { path: path.clone() }
        }
        other => other.clone(),
    };
    Ok(Dataset {
        points,
        true_labels: dataset.true_labels.clone(),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn csv_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn variance(points: &[Vec<f64>], f: usize) -> f64 {
        let n = points.len() as f64;
        let m = points.iter().map(|x| x[f]).sum::<f64>() / n;
        points.iter().map(|x| (x[f] - m).powi(2)).sum::<f64>() / (n - 1.0)
    }

    #[test]
    fn blobs_round_robin() {
        let ds = make_blobs(3, 3, 5, 1.0).unwrap();
        assert_eq!(ds.true_labels, Some(vec![0, 1, 2]));
        let ds = make_blobs(7, 3, 5, 0.0).unwrap();
        let centers = blob_centers(3, 5);
        for (x, l) in ds.points.iter().zip(ds.true_labels.unwrap()) {
            assert_eq!(x.as_slice(), centers[l].as_slice());
        }
        assert!(make_blobs(2, 3, 0, 1.0).is_err());
    }

    #[test]
    fn blobs_deterministic() {
        assert_eq!(
            make_blobs(40, 3, 11, 1.0).unwrap(),
            make_blobs(40, 3, 11, 1.0).unwrap()
        );
        assert_ne!(
            make_blobs(40, 3, 11, 1.0).unwrap(),
            make_blobs(40, 3, 12, 1.0).unwrap()
        );
    }

    #[test]
    fn csv_examples() {
        let ds = load_csv(csv_file("1,2\n3,4\n").path()).unwrap();
        assert_eq!(ds.points, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(ds.true_labels, None);

        let ds = load_csv(csv_file("x,y\n1,2\n").path()).unwrap();
        assert_eq!(ds.points, vec![vec![1.0, 2.0]]);

        match load_csv(csv_file("1,2\n3\n").path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match load_csv(csv_file("1,2\n3,abc\n").path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load_csv(csv_file("").path()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_csv(csv_file("a,b\n").path()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn pca_axis_aligned() {
        // Diagonal covariance, four times larger along x.
        let pts = vec![
            vec![2.0, 0.0],
            vec![-2.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let ds = Dataset {
            points: pts.clone(),
            true_labels: None,
            provenance: Provenance::Csv { path: "x".into() },
        };
        let p = pca_2d(&ds).unwrap();
        assert!(matches!(p.provenance, Provenance::CsvPca { .. }));
        for (a, b) in p.points.iter().zip(&pts) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn pca_rank_one_line() {
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|t| {
                let t = t as f64;
                vec![1.0 + t, 2.0 - 2.0 * t, 0.5 * t]
            })
            .collect();
        let ds = Dataset {
            points: pts,
            true_labels: None,
            provenance: Provenance::Csv { path: "x".into() },
        };
        let p = pca_2d(&ds).unwrap();
        assert!(variance(&p.points, 1) < 1e-8);
        assert!(pca_2d(&ds.head(1).unwrap()).is_err());
    }

    #[test]
    fn pca_rejects_one_dimension() {
        let ds = Dataset {
            points: vec![vec![1.0], vec![2.0]],
            true_labels: None,
            provenance: Provenance::Csv { path: "x".into() },
        };
        assert!(matches!(pca_2d(&ds), Err(Error::Dimension { .. })));
    }

    #[test]
    fn standardize_unit_variance() {
        let ds = make_blobs(30, 2, 1, 1.0).unwrap().standardize();
        for f in 0..2 {
            assert!((variance(&ds.points, f) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subsample_without_replacement() {
        let ds = make_blobs(20, 2, 3, 1.0).unwrap();
        let s = ds.subsample(20, 4).unwrap();
        let mut a = s.points.clone();
        let mut b = ds.points.clone();
        a.sort_by(|x, y| x[0].total_cmp(&y[0]));
        b.sort_by(|x, y| x[0].total_cmp(&y[0]));
        assert_eq!(a, b);
    }
}
