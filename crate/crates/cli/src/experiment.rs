//! Sample-size sweep over seeding methods.

use std::time::Instant;

use aqoci_core::kmeans::random_init;
use aqoci_core::metrics::inertia;
use aqoci_core::rng::child_seed;
use aqoci_core::{
    lloyd, run_refinement, AnnealConfig, ClusterRun, Dataset, Init, KMeansConfig, LoopConfig,
    MetricReport, RefinementResult, RemoteSolverConfig, SampleSource, SamplerChoice,
};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Method};
use crate::error::{CliError, Result};

/// How a sampler-seeded run obtained its centroids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingSummary {
    pub source: SampleSource,
    pub one_hot: bool,
    pub num_qubits: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub final_objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub sample_size: usize,
    pub metrics: MetricReport,
    pub run: ClusterRun,
    pub seeding: Option<SeedingSummary>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvStamp {
    pub version: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub env: EnvStamp,
    pub config: ExperimentConfig,
    pub rows: Vec<BenchRow>,
    pub wall_time_secs: f64,
}

impl BenchReport {
    pub fn row(&self, method: Method, sample_size: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.sample_size == sample_size)
    }

    /// Methods in report order.
    pub fn methods(&self) -> Vec<Method> {
        let mut m: Vec<Method> = self.rows.iter().map(|r| r.method).collect();
        m.dedup();
        m
    }
}

/// Sampler used by a QUBO-seeded method.
pub fn sampler_for(method: Method, config: &ExperimentConfig) -> Result<SamplerChoice> {
    match method {
        Method::Random => Err(CliError::Config("random seeding uses no sampler".into())),
        Method::Sa => Ok(SamplerChoice::Anneal(config.anneal.clone())),
        Method::Tabu => Ok(SamplerChoice::Tabu(config.tabu.clone())),
        Method::Remote => {
            let r = &config.remote;
            match &r.endpoint {
                Some(endpoint) => Ok(SamplerChoice::Remote(RemoteSolverConfig {
                    endpoint: endpoint.clone(),
                    auth_token: r.auth_token.clone(),
                    timeout_secs: r.timeout_secs,
                    offline_fallback: r.offline_fallback,
                })),
                None if r.offline_fallback => {
                    log::warn!("no remote endpoint configured; using the local annealer");
                    Ok(SamplerChoice::Anneal(AnnealConfig::default()))
                }
                None => Err(CliError::Config(
                    "method remote needs an endpoint or offline fallback".into(),
                )),
            }
        }
    }
}

/// One adaptive-refinement run on `points` with the experiment settings.
pub fn refine(
    points: &[Vec<f64>],
    method: Method,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<RefinementResult> {
    let loop_config = LoopConfig {
        max_iterations: config.iterations,
        scale_factor: config.scale_factor,
        seed,
        ..LoopConfig::new(sampler_for(method, config)?)
    };
    Ok(run_refinement(
        points,
        config.k,
        config.grid,
        &config.penalties,
        &loop_config,
    )?)
}

fn run_cell(data: &Dataset, method: Method, config: &ExperimentConfig) -> Result<BenchRow> {
    let start = Instant::now();
    let m = data.len();
    let seed = child_seed(config.seed, m as u64);
    let (centroids, seeding) = match method {
        Method::Random => (random_init(&data.points, config.k, seed)?, None),
        _ => {
            let r = refine(&data.points, method, config, seed)?;
            let last = r.trace.iterations.last();
            let summary = SeedingSummary {
                source: last.map_or(SampleSource::Oracle, |i| i.source),
                one_hot: r.one_hot,
                num_qubits: r.trace.num_qubits,
                delta1: r.trace.delta1,
                delta2: r.trace.delta2,
                final_objective: last.map_or(f64::NAN, |i| i.objective),
                iterations: r.trace.iterations.len(),
            };
            (r.centroids, Some(summary))
        }
    };
    let run = lloyd(
        &data.points,
        &KMeansConfig::new(config.k, Init::Provided(centroids)),
    )?;
    let metrics = MetricReport::from_run(&data.points, &run, data.true_labels.as_deref())?;
    log::info!(
        "{method} m={m}: inertia {:.4}, silhouette {:.4}, n_iter {}",
        metrics.inertia,
        metrics.silhouette,
        metrics.n_iter
    );
    Ok(BenchRow {
        method,
        sample_size: m,
        metrics,
        run,
        seeding,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Runs every (method, sample size) cell. For each size the first `m`
/// samples of the dataset are used; rows are ordered by method, then size.
pub fn run_experiment(config: &ExperimentConfig) -> Result<BenchReport> {
    let start = Instant::now();
    config.validate()?;
    let dataset = config.load_dataset()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    let mut rows = Vec::new();
    for &method in &methods {
        for &m in &config.sample_sizes {
            rows.push(run_cell(&dataset.head(m)?, method, config)?);
        }
    }
    Ok(BenchReport {
        env: EnvStamp {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash()?,
        },
        config: config.clone(),
        rows,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Recomputes every stored metric from the dataset and the stored runs.
pub fn verify_report(report: &BenchReport) -> Result<()> {
    let dataset = report.config.load_dataset()?;
    for row in &report.rows {
        let data = dataset.head(row.sample_size)?;
        let fresh = MetricReport::from_run(&data.points, &row.run, data.true_labels.as_deref())?;
        let stored = inertia(&data.points, &row.run.labels, &row.run.final_centroids)?;
        if fresh != row.metrics || (stored - row.run.inertia).abs() > 1e-9 {
            return Err(CliError::Config(format!(
                "metrics of {} at size {} do not re-derive from the stored run",
                row.method, row.sample_size
            )));
        }
    }
    Ok(())
}
