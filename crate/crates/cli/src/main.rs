use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use aqoci_cli::config::{DatasetSpec, ExperimentConfig, Method};
use aqoci_cli::experiment::{refine, verify_report};
use aqoci_cli::{emit_outputs, load_report, run_experiment, CliError};
use aqoci_core::data::make_blobs;
use aqoci_core::rng::child_seed;
use aqoci_core::{run_refinement, LoopConfig, SamplerChoice};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "aqoci",
    version,
    about = "QUBO-seeded k-means centroid initialization"
)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Gaussian-blob dataset (CSV, or JSON with labels for *.json).
    Generate {
        #[arg(long, default_value_t = 250)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        std: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one refinement loop and print the centroids and trace.
    Solve {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Use the first SIZE samples (default: all).
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, value_enum, default_value_t = SolverKind::Tabu)]
        sampler: SolverKind,
        /// Write the trace here instead of printing it.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the full sample-size sweep and write report, table and charts.
    Bench {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Recompute every stored metric after the run.
        #[arg(long)]
        verify: bool,
    },
    /// Re-emit table and charts from an existing report.json.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Sa,
    Tabu,
    Remote,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Blobs,
    Csv,
}

/// Experiment settings; each flag overrides the config file.
#[derive(Args)]
struct ExperimentArgs {
    /// JSON file with any subset of the experiment fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    dataset: Option<DatasetKind>,
    /// CSV input (implies --dataset csv).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    pca: bool,
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    blob_n: Option<usize>,
    #[arg(long)]
    blob_std: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    bits: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Scale factor applied to every grid pitch per iteration.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    delta1: Option<f64>,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    global_offset: Option<f64>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    endpoint: Option<String>,
    /// Bearer token; overrides AQOCI_SOLVER_TOKEN.
    #[arg(long)]
    token: Option<String>,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    offline_fallback: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &self.csv {
            cfg.dataset = DatasetSpec::Csv {
                path: path.clone(),
                pca: false,
                standardize: false,
            };
        } else if let Some(DatasetKind::Blobs) = self.dataset {
            if !matches!(cfg.dataset, DatasetSpec::Blobs { .. }) {
                cfg.dataset = DatasetSpec::default();
            }
        } else if let Some(DatasetKind::Csv) = self.dataset {
            if !matches!(cfg.dataset, DatasetSpec::Csv { .. }) {
                return Err(CliError::Config("--dataset csv needs --csv PATH".into()));
            }
        }
        match &mut cfg.dataset {
            DatasetSpec::Blobs { n, std } => {
                if let Some(v) = self.blob_n {
                    *n = v;
                }
                if let Some(v) = self.blob_std {
                    *std = v;
                }
            }
            DatasetSpec::Csv {
                pca, standardize, ..
            } => {
                *pca |= self.pca;
                *standardize |= self.standardize;
            }
        }
        set(&mut cfg.k, self.k);
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.sample_sizes, self.sizes.clone());
        if let Some(names) = &self.methods {
            cfg.methods = names
                .iter()
                .map(|m| m.parse::<Method>())
                .collect::<Result<_, _>>()?;
        }
        set(&mut cfg.grid.bits, self.bits);
        set(&mut cfg.grid.lower, self.lower);
        set(&mut cfg.grid.upper, self.upper);
        set(&mut cfg.iterations, self.iterations);
        set(&mut cfg.scale_factor, self.beta);
        if self.delta1.is_some() {
            cfg.penalties.delta1 = self.delta1;
        }
        if self.delta2.is_some() {
            cfg.penalties.delta2 = self.delta2;
        }
        set(&mut cfg.penalties.lambda, self.lambda);
        set(&mut cfg.penalties.global_offset, self.global_offset);
        set(&mut cfg.anneal.sweeps, self.sweeps);
        set(&mut cfg.anneal.num_reads, self.reads);
        set(&mut cfg.tabu.restarts, self.restarts);
        if self.endpoint.is_some() {
            cfg.remote.endpoint = self.endpoint.clone();
        }
        if self.token.is_some() {
            cfg.remote.auth_token = self.token.clone();
        }
        set(&mut cfg.remote.timeout_secs, self.timeout);
        cfg.remote.offline_fallback |= self.offline_fallback;
        set(&mut cfg.output_dir, self.out.clone());
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn generate(n: usize, k: usize, seed: u64, std: f64, out: &Path) -> anyhow::Result<()> {
    let ds = make_blobs(n, k, seed, std).map_err(CliError::from)?;
    let write = || -> Result<(), CliError> {
        if out.extension().is_some_and(|e| e == "json") {
            std::fs::write(out, serde_json::to_string_pretty(&ds)?)?;
        } else {
            let mut w = csv::Writer::from_path(out)?;
            w.write_record(["x", "y"])?;
            for p in &ds.points {
                w.write_record(p.iter().map(|v| v.to_string()))?;
            }
            w.flush()?;
        }
        Ok(())
    };
    write().with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {n} samples to {}", out.display());
    Ok(())
}

fn solve(
    exp: &ExperimentArgs,
    size: Option<usize>,
    sampler: SolverKind,
    trace: Option<&Path>,
) -> anyhow::Result<()> {
    let mut cfg = exp.resolve()?;
    let ds = {
        // Solving needs only the dataset, not a full sweep.
        let full = size.unwrap_or(usize::MAX);
        cfg.sample_sizes = vec![cfg.k.max(1)];
        cfg.validate()?;
        let ds = cfg.load_dataset()?;
        ds.head(full.min(ds.len())).map_err(CliError::from)?
    };
    let seed = child_seed(cfg.seed, ds.len() as u64);
    let result = match sampler {
        SolverKind::Oracle => {
            let loop_config = LoopConfig {
                max_iterations: cfg.iterations,
                scale_factor: cfg.scale_factor,
                seed,
                ..LoopConfig::new(SamplerChoice::Oracle)
            };
            run_refinement(&ds.points, cfg.k, cfg.grid, &cfg.penalties, &loop_config)
                .map_err(CliError::from)?
        }
        SolverKind::Sa => refine(&ds.points, Method::Sa, &cfg, seed)?,
        SolverKind::Tabu => refine(&ds.points, Method::Tabu, &cfg, seed)?,
        SolverKind::Remote => refine(&ds.points, Method::Remote, &cfg, seed)?,
    };
    let summary = serde_json::json!({
        "centroids": result.centroids,
        "labels": result.labels,
        "one_hot": result.one_hot,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    match trace {
        Some(path) => {
            std::fs::write(path, result.trace.to_json().map_err(CliError::from)?)
                .map_err(CliError::from)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{}", result.trace.to_json().map_err(CliError::from)?),
    }
    Ok(())
}

fn bench(exp: &ExperimentArgs, verify: bool) -> anyhow::Result<()> {
    let cfg = exp.resolve()?;
    let report = run_experiment(&cfg)?;
    if verify {
        verify_report(&report)?;
    }
    for path in emit_outputs(&report, &cfg.output_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn report(input: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let report = load_report(input)?;
    let dir = out
        .or_else(|| input.parent())
        .unwrap_or_else(|| Path::new("."));
    for path in emit_outputs(&report, dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Generate {
            n,
            k,
            seed,
            std,
            out,
        } => generate(*n, *k, *seed, *std, out),
        Command::Solve {
            exp,
            size,
            sampler,
            trace,
        } => solve(exp, *size, *sampler, trace.as_deref()),
        Command::Bench { exp, verify } => bench(exp, *verify),
        Command::Report { input, out } => report(input, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
