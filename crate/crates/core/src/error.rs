use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("brute-force oracle limited to {max} variables, problem has {num_vars}")]
    OracleTooLarge { num_vars: usize, max: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("coefficient for {term} is not finite")]
    NonFinite { term: String },

    #[error("invalid range: upper limit {upper} must exceed lower limit {lower}")]
    Range { upper: f64, lower: f64 },

    #[error("layout error: {0}")]
    Layout(String),

    #[error("polynomial degree {0} exceeds the supported maximum of 4")]
    UnsupportedDegree(usize),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("remote solver error: {0}")]
    Remote(String),

    #[error("malformed solver response: {0}")]
    MalformedResponse(String),

    #[error(
        "record {record}: reported energy {reported} differs from local evaluation {computed}"
    )]
    EnergyMismatch {
        record: usize,
        reported: f64,
        computed: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
