pub mod data;
pub mod encoding;
pub mod error;
pub mod formulation;
pub mod kmeans;
pub mod metrics;
pub mod qubo;
pub mod refine;
pub mod rng;
pub mod samplers;

pub use data::{make_blobs, Dataset, Provenance};
pub use encoding::{FixedPointCodec, ScaleOffsetEntry, SignMode, WeightGrid};
pub use error::{Error, Result};
pub use kmeans::{lloyd, ClusterRun, Init, KMeansConfig};
pub use metrics::MetricReport;
pub use qubo::{BitVector, IsingProblem, QuboProblem};
pub use refine::{run_refinement, GridSpec, LoopConfig, PenaltyConfig, RefinementResult};
pub use samplers::{
    AnnealConfig, RemoteSolverConfig, SampleRecord, SampleSet, SampleSource, SamplerChoice,
    TabuConfig,
};
