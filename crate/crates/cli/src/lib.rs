//! Experiment harness for AQOCI centroid seeding: configuration, the
//! sample-size sweep, and report/chart output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{DatasetSpec, ExperimentConfig, Method, RemoteSettings};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, verify_report, BenchReport, BenchRow};
pub use output::{emit_outputs, load_report, read_metrics_csv};
