//! Experiment configuration, loadable from JSON and overridable by flags.

use std::path::{Path, PathBuf};

use aqoci_core::data::{load_csv, make_blobs, pca_2d, Dataset};
use aqoci_core::{AnnealConfig, GridSpec, PenaltyConfig, TabuConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Sa,
    Tabu,
    Remote,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Sa => "sa",
            Method::Tabu => "tabu",
            Method::Remote => "remote",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Method::Random),
            "sa" => Ok(Method::Sa),
            "tabu" => Ok(Method::Tabu),
            "remote" => Ok(Method::Remote),
            other => Err(CliError::Config(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DatasetSpec {
    /// Gaussian blobs; cluster count and seed come from the experiment.
    Blobs {
        #[serde(default = "default_blob_n")]
        n: usize,
        #[serde(default = "default_std")]
        std: f64,
    },
    /// Numeric CSV, shuffled once with the experiment seed so that every
    /// prefix is a uniform sample without replacement.
    Csv {
        path: PathBuf,
        #[serde(default)]
        pca: bool,
        #[serde(default)]
        standardize: bool,
    },
}

fn default_blob_n() -> usize {
    250
}

fn default_std() -> f64 {
    1.0
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec::Blobs {
            n: default_blob_n(),
            std: default_std(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteSettings {
    pub endpoint: Option<String>,
    /// Never serialized; falls back to the solver token environment variable.
    #[serde(skip_serializing)]
    pub auth_token: Option<String>,
    pub timeout_secs: f64,
    pub offline_fallback: bool,
}

impl Default for RemoteSettings {
    fn default() -> Self {
        Self {
            endpoint: None,
            auth_token: None,
            timeout_secs: 30.0,
            offline_fallback: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub k: usize,
    pub seed: u64,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub grid: GridSpec,
    pub iterations: usize,
    pub scale_factor: f64,
    pub penalties: PenaltyConfig,
    pub anneal: AnnealConfig,
    pub tabu: TabuConfig,
    pub remote: RemoteSettings,
    /// Where outputs go; not part of the experiment identity.
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSpec::default(),
            k: 3,
            seed: 0,
            sample_sizes: vec![50, 100, 150, 200, 250],
            methods: vec![Method::Random, Method::Sa, Method::Tabu],
            grid: GridSpec::default(),
            iterations: 10,
            scale_factor: 2.0,
            penalties: PenaltyConfig::default(),
            anneal: AnnealConfig::default(),
            tabu: TabuConfig::default(),
            remote: RemoteSettings::default(),
            output_dir: PathBuf::from("aqoci-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks everything that does not need the dataset.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.k == 0 {
            return fail("k must be positive".into());
        }
        if self.sample_sizes.is_empty() {
            return fail("at least one sample size is required".into());
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!(
                "sample sizes must be strictly ascending, got {:?}",
                self.sample_sizes
            ));
        }
        if self.sample_sizes[0] < self.k {
            return fail(format!(
                "sample size {} is smaller than k = {}",
                self.sample_sizes[0], self.k
            ));
        }
        if self.methods.is_empty() {
            return fail("at least one method is required".into());
        }
        if self.iterations == 0 {
            return fail("iterations must be positive".into());
        }
        if !(self.scale_factor > 1.0 && self.scale_factor.is_finite()) {
            return fail(format!(
                "scale factor must exceed 1, got {}",
                self.scale_factor
            ));
        }
        if self.grid.upper.partial_cmp(&self.grid.lower) != Some(std::cmp::Ordering::Greater) {
            return fail(format!(
                "range upper {} must exceed lower {}",
                self.grid.upper, self.grid.lower
            ));
        }
        if !(1..=30).contains(&self.grid.bits) {
            return fail(format!("bits must be in 1..=30, got {}", self.grid.bits));
        }
        if self.methods.contains(&Method::Remote)
            && self.remote.endpoint.is_none()
            && !self.remote.offline_fallback
        {
            return fail("method remote needs an endpoint or offline fallback".into());
        }
        if let DatasetSpec::Blobs { n, std } = self.dataset {
            if !(std.is_finite() && std >= 0.0) {
                return fail(format!("blob std must be non-negative, got {std}"));
            }
            if n < self.k {
                return fail(format!("blob count {n} is smaller than k = {}", self.k));
            }
        }
        Ok(())
    }

    /// Loads the dataset and checks the sample sizes against it.
    pub fn load_dataset(&self) -> Result<Dataset> {
        let ds = match &self.dataset {
            DatasetSpec::Blobs { n, std } => make_blobs(*n, self.k, self.seed, *std)?,
            DatasetSpec::Csv {
                path,
                pca,
                standardize,
            } => {
                let mut ds = load_csv(path)?;
                if *standardize {
                    ds = ds.standardize();
                }
                if *pca {
                    ds = pca_2d(&ds)?;
                }
                ds.subsample(ds.len(), self.seed)?
            }
        };
        if let Some(&max) = self.sample_sizes.last() {
            if max > ds.len() {
                return Err(CliError::Config(format!(
                    "largest sample size {max} exceeds the dataset size {}",
                    ds.len()
                )));
            }
        }
        Ok(ds)
    }

    /// SHA-256 of the canonical (sorted-key) JSON form.
    pub fn hash(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let canonical = serde_json::to_string(&value)?;
        let digest = Sha256::digest(canonical.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"k": 2, "methods": ["random", "tabu"]}"#).unwrap();
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.methods, vec![Method::Random, Method::Tabu]);
        assert_eq!(cfg.sample_sizes, vec![50, 100, 150, 200, 250]);
        assert_eq!(cfg.grid, GridSpec::default());
    }

    #[test]
    fn hash_ignores_key_order_and_output_dir() {
        let a: ExperimentConfig = serde_json::from_str(r#"{"k": 2, "seed": 5}"#).unwrap();
        let mut b: ExperimentConfig = serde_json::from_str(r#"{"seed": 5, "k": 2}"#).unwrap();
        b.output_dir = "elsewhere".into();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 6;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            r#"{"sample_sizes": [100, 50]}"#,
            r#"{"sample_sizes": []}"#,
            r#"{"methods": []}"#,
            r#"{"methods": ["remote"]}"#,
            r#"{"iterations": 0}"#,
            r#"{"scale_factor": 1.0}"#,
            r#"{"grid": {"bits": 4, "lower": 1.0, "upper": 1.0}}"#,
            r#"{"k": 0}"#,
        ];
        for json in bad {
            let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
            assert!(matches!(cfg.validate(), Err(CliError::Config(_))), "{json}");
        }
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"methods": ["remote"], "remote": {"offline_fallback": true}}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
    }

    #[test]
    fn oversized_sample_is_rejected() {
        let cfg = ExperimentConfig {
            dataset: DatasetSpec::Blobs { n: 100, std: 1.0 },
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.load_dataset(), Err(CliError::Config(_))));
    }
}
