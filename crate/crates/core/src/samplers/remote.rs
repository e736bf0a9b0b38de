//! Client for an external hybrid QUBO solver.
//!
//! Wire protocol: `POST {endpoint}/solve` with `Authorization: Bearer
//! <token>` and the problem's JSON serialization as the body. The server
//! answers `{"records": [{"bits": "0101", "energy": e, "occurrences": m}]}`.
//! Reported energies are checked against local evaluation.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{simulated_annealing, AnnealConfig, SampleSet, SampleSource};
use crate::error::{Error, Result};
use crate::qubo::{BitVector, QuboProblem};

/// Environment variable consulted when no token is configured.
pub const SOLVER_TOKEN_ENV: &str = "AQOCI_SOLVER_TOKEN";

const ENERGY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteSolverConfig {
    pub endpoint: String,
    #[serde(default, skip_serializing)]
    pub auth_token: Option<String>,
    pub timeout_secs: f64,
    pub offline_fallback: bool,
}

impl RemoteSolverConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            auth_token: None,
            timeout_secs: 30.0,
            offline_fallback: false,
        }
    }

    /// Explicit token, else the environment variable.
    pub fn token(&self) -> Option<String> {
        self.auth_token
            .clone()
            .or_else(|| std::env::var(SOLVER_TOKEN_ENV).ok())
    }

    fn solve_url(&self) -> String {
        format!("{}/solve", self.endpoint.trim_end_matches('/'))
    }
}

#[derive(Deserialize)]
struct WireRecord {
    bits: String,
    energy: f64,
    occurrences: u64,
}

#[derive(Deserialize)]
struct WireResponse {
    records: Vec<WireRecord>,
}

fn parse_response(problem: &QuboProblem, body: &str) -> Result<SampleSet> {
    let wire: WireResponse =
        serde_json::from_str(body).map_err(|e| Error::MalformedResponse(e.to_string()))?;
    if wire.records.is_empty() {
        return Err(Error::MalformedResponse("no records".into()));
    }
    let mut counted = Vec::with_capacity(wire.records.len());
    for (i, r) in wire.records.into_iter().enumerate() {
        let bits: BitVector = r
            .bits
            .parse()
            .map_err(|_| Error::MalformedResponse(format!("record {i}: invalid bit string")))?;
        if bits.len() != problem.num_vars() {
            return Err(Error::MalformedResponse(format!(
                "record {i}: {} bits for {} variables",
                bits.len(),
                problem.num_vars()
            )));
        }
        if r.occurrences == 0 {
            return Err(Error::MalformedResponse(format!(
                "record {i}: zero occurrences"
            )));
        }
        let computed = problem.energy(&bits)?;
        let gap = (computed - r.energy).abs();
        if gap.is_nan() || gap > ENERGY_TOLERANCE {
            return Err(Error::EnergyMismatch {
                record: i,
                reported: r.energy,
                computed,
            });
        }
        counted.push((bits, r.occurrences));
    }
    SampleSet::from_counts(problem, counted, SampleSource::Remote)
}

/// Sends `problem` to the configured endpoint. When the endpoint cannot be
/// reached and `offline_fallback` is set, the default annealer runs locally
/// instead and the result is tagged [`SampleSource::Fallback`].
pub fn remote_hybrid(problem: &QuboProblem, config: &RemoteSolverConfig) -> Result<SampleSet> {
    if !(config.timeout_secs > 0.0 && config.timeout_secs.is_finite()) {
        return Err(Error::Config("remote timeout must be positive".into()));
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut request = agent.post(config.solve_url());
    if let Some(token) = config.token() {
        request = request.header("Authorization", format!("Bearer {token}"));
    }
    let response = match request
        .header("Content-Type", "application/json")
        .send(problem.to_json()?)
    {
        Ok(r) => r,
        Err(e) if config.offline_fallback => {
            log::warn!("remote solver unreachable ({e}); using local annealer");
            let mut set = simulated_annealing(problem, &AnnealConfig::default())?;
            set.source = SampleSource::Fallback;
            return Ok(set);
        }
        Err(e) => return Err(Error::Remote(e.to_string())),
    };
    let status = response.status();
    let body = response
        .into_body()
        .read_to_string()
        .map_err(|e| Error::Remote(e.to_string()))?;
    if !status.is_success() {
        return Err(Error::Remote(format!("http status {status}: {body}")));
    }
    parse_response(problem, &body)
}
