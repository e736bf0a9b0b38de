//! Adaptive scale/offset refinement around repeated formulate, sample and
//! decode rounds.
//!
//! Every `W` entry owns an affine map `value = b * scale + offset` over the
//! unsigned code `b`. After each round the map is contracted by `beta` and
//! re-centred so the decoded value stays representable by the same code.

use serde::{Deserialize, Serialize};

use crate::encoding::{initial_scale, to_real, ScaleOffsetEntry, WeightGrid};
use crate::error::{Error, Result};
use crate::formulation::{assemble, decode_solution, default_penalty, CentroidProblem};
use crate::rng::splitmix64;
use crate::samplers::{SampleSet, SampleSource, SamplerChoice};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementState {
    pub scales: Vec<f64>,
    pub offsets: Vec<f64>,
    pub iteration: usize,
    /// Decoded `W` entries (index `a * k + b`) after each iteration.
    pub history: Vec<Vec<f64>>,
    pub scale_factor: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
    pub bits: u32,
}

impl RefinementState {
    pub fn entries(&self) -> Vec<ScaleOffsetEntry> {
        self.scales
            .iter()
            .zip(&self.offsets)
            .map(|(&scale, &offset)| ScaleOffsetEntry { scale, offset })
            .collect()
    }
}

pub fn initialize_state(
    upper: f64,
    lower: f64,
    bits: u32,
    num_weights: usize,
    beta: f64,
) -> Result<RefinementState> {
    let scale = initial_scale(upper, lower, bits)?;
    check_beta(beta)?;
    Ok(RefinementState {
        scales: vec![scale; num_weights],
        offsets: vec![lower; num_weights],
        iteration: 0,
        history: Vec::new(),
        scale_factor: beta,
        lower_limit: lower,
        upper_limit: upper,
        bits,
    })
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::Config(format!(
            "scale factor must exceed 1, got {beta}"
        )));
    }
    Ok(())
}

/// Contracts one entry around code `b`: the scale shrinks by `beta` and the
/// offset moves so that `b` still decodes to the same value. The range
/// limits only seed the initial state; they play no part here.
pub fn update_entry(
    b: i64,
    entry: ScaleOffsetEntry,
    bits: u32,
    beta: f64,
) -> Result<ScaleOffsetEntry> {
    let max = (1i64 << bits) - 1;
    if !(0..=max).contains(&b) {
        return Err(Error::Decode(format!("code {b} outside [0, {max}]")));
    }
    check_beta(beta)?;
    let scale = entry.scale / beta;
    let b = b as f64;
    Ok(ScaleOffsetEntry {
        scale,
        offset: b * entry.scale + entry.offset - b * scale,
    })
}

/// `||current - previous|| / ||previous||`. An all-zero `previous` gives 0
/// when the vectors agree and infinity otherwise.
pub fn relative_error(current: &[f64], previous: &[f64]) -> Result<f64> {
    if current.len() != previous.len() {
        return Err(Error::Dimension {
            expected: previous.len(),
            found: current.len(),
        });
    }
    let diff = current
        .iter()
        .zip(previous)
        .map(|(c, p)| (c - p) * (c - p))
        .sum::<f64>()
        .sqrt();
    let norm = previous.iter().map(|p| p * p).sum::<f64>().sqrt();
    Ok(if norm > 0.0 {
        diff / norm
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    })
}

/// Weight grid: `bits` qubits per entry spread initially over `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub bits: u32,
    pub lower: f64,
    pub upper: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            bits: 4,
            lower: -8.0,
            upper: 7.0,
        }
    }
}

/// Penalty and scaling overrides. Unset penalties fall back to
/// `10 * (1 + max ||v||^2)`, raised where needed to twice the substitution
/// bound (`delta1`) and the one-hot bound (`delta2`) of the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    #[serde(default)]
    pub delta1: Option<f64>,
    #[serde(default)]
    pub delta2: Option<f64>,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub global_offset: f64,
    #[serde(default)]
    pub cross_terms: bool,
}

fn one() -> f64 {
    1.0
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            delta1: None,
            delta2: None,
            lambda: 1.0,
            global_offset: 0.0,
            cross_terms: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub max_iterations: usize,
    /// Relative-error threshold. Reported in the trace only; the loop
    /// always runs `max_iterations` rounds.
    pub tolerance: f64,
    pub scale_factor: f64,
    pub sampler: SamplerChoice,
    /// Round `t` samples with seed `splitmix64(seed + t)`.
    pub seed: u64,
}

impl LoopConfig {
    pub fn new(sampler: SamplerChoice) -> Self {
        Self {
            max_iterations: 10,
            tolerance: 1e-3,
            scale_factor: 2.0,
            sampler,
            seed: 0,
        }
    }

    pub fn round_seed(&self, iteration: usize) -> u64 {
        splitmix64(self.seed.wrapping_add(iteration as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Scales and offsets used to formulate this round.
    pub scales: Vec<f64>,
    pub offsets: Vec<f64>,
    pub best_energy: f64,
    pub source: SampleSource,
    pub codes: Vec<i64>,
    /// Decoded centroids, `centroids[b][a]`.
    pub centroids: Vec<Vec<f64>>,
    /// `sum_j ||v_j - W h_j||^2` for the decoded best record.
    pub objective: f64,
    /// `null` on the first round or when the previous iterate was zero.
    pub relative_error: Option<f64>,
    pub one_hot: bool,
    pub aux_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementTrace {
    pub state: RefinementState,
    pub iterations: Vec<IterationRecord>,
    pub delta1: f64,
    pub delta2: f64,
    pub num_qubits: usize,
    /// First round whose relative error fell to the tolerance, if any.
    pub below_tolerance_at: Option<usize>,
    /// `H` of the final best record before any repair, `raw_h[l][j]`.
    pub raw_h: Vec<Vec<u8>>,
}

impl RefinementTrace {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementResult {
    /// Final centroids, `centroids[b][a]`.
    pub centroids: Vec<Vec<f64>>,
    /// One-hot `H` after repair, `h[l][j]`.
    pub h: Vec<Vec<u8>>,
    pub labels: Vec<usize>,
    /// The final best record was one-hot without repair.
    pub one_hot: bool,
    pub trace: RefinementTrace,
}

fn residual(data: &[Vec<f64>], centroids: &[Vec<f64>], h: &[Vec<u8>]) -> f64 {
    let mut total = 0.0;
    for (j, v) in data.iter().enumerate() {
        for (a, &va) in v.iter().enumerate() {
            let wh: f64 = centroids
                .iter()
                .zip(h)
                .map(|(c, row)| c[a] * row[j] as f64)
                .sum();
            total += (va - wh) * (va - wh);
        }
    }
    total
}

/// Replaces every non-one-hot column of `h` by the cluster whose qubit has
/// the largest marginal across `samples` (ties to the lowest index).
fn repair_one_hot(
    h: &[Vec<u8>],
    samples: &SampleSet,
    h_index: impl Fn(usize, usize) -> usize,
) -> Vec<Vec<u8>> {
    let marginals = samples.marginals();
    let k = h.len();
    let n = h.first().map_or(0, Vec::len);
    let mut out = h.to_vec();
    for j in 0..n {
        if (0..k).map(|l| h[l][j] as usize).sum::<usize>() == 1 {
            continue;
        }
        let mut pick = 0;
        for l in 1..k {
            if marginals[h_index(l, j)] > marginals[h_index(pick, j)] {
                pick = l;
            }
        }
        for (l, row) in out.iter_mut().enumerate() {
            row[j] = u8::from(l == pick);
        }
    }
    out
}

/// Runs the fixed-budget refinement loop and returns real centroids plus a
/// one-hot assignment of every sample.
pub fn run_refinement(
    data: &[Vec<f64>],
    k: usize,
    grid: GridSpec,
    penalties: &PenaltyConfig,
    config: &LoopConfig,
) -> Result<RefinementResult> {
    if config.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be at least 1".into()));
    }
    let weight_grid = WeightGrid::unsigned(grid.bits)?;
    let default = default_penalty(data);
    let mut problem = CentroidProblem::new(data.to_vec(), k, weight_grid)?
        .with_penalties(
            penalties.delta1.unwrap_or(default),
            penalties.delta2.unwrap_or(default),
        )?
        .with_scaling(penalties.lambda, penalties.global_offset)?
        .with_cross_terms(penalties.cross_terms);
    let mut state = initialize_state(
        grid.upper,
        grid.lower,
        grid.bits,
        problem.num_weights(),
        config.scale_factor,
    )?;
    if penalties.delta1.is_none() {
        problem.certify_delta1(&state.entries())?;
    }
    if penalties.delta2.is_none() {
        problem.certify_delta2(&state.entries())?;
    }

    let mut iterations = Vec::with_capacity(config.max_iterations);
    let mut below_tolerance_at = None;
    let mut last = None;
    for t in 1..=config.max_iterations {
        let entries = state.entries();
        let (qubo, layout) = assemble(&problem, &entries)?;
        let samples = config.sampler.sample(&qubo, Some(config.round_seed(t)))?;
        let best = samples
            .best()
            .ok_or_else(|| Error::Decode("sampler returned no records".into()))?;
        let decoded = decode_solution(&best.assignment, &layout, &weight_grid, &entries)?;

        let mut next = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (&code, &entry) in decoded.codes.iter().zip(&entries) {
            values.push(to_real(code, entry));
            next.push(update_entry(code, entry, grid.bits, config.scale_factor)?);
        }
        let rel = match state.history.last() {
            Some(prev) => Some(relative_error(&values, prev)?),
            None => None,
        };
        if below_tolerance_at.is_none() && rel.is_some_and(|e| e <= config.tolerance) {
            below_tolerance_at = Some(t);
            log::info!(
                "relative error {:.3e} reached tolerance at round {t}",
                rel.unwrap_or(0.0)
            );
        }
        log::debug!(
            "round {t}: energy {:.6e}, source {:?}, one-hot {}",
            best.energy,
            samples.source,
            decoded.one_hot
        );
        iterations.push(IterationRecord {
            iteration: t,
            scales: state.scales.clone(),
            offsets: state.offsets.clone(),
            best_energy: best.energy,
            source: samples.source,
            codes: decoded.codes.clone(),
            objective: residual(data, &decoded.centroids, &decoded.h),
            centroids: decoded.centroids.clone(),
            relative_error: rel.filter(|e| e.is_finite()),
            one_hot: decoded.one_hot,
            aux_consistent: decoded.aux_consistent,
        });
        state.scales = next.iter().map(|e| e.scale).collect();
        state.offsets = next.iter().map(|e| e.offset).collect();
        state.history.push(values);
        state.iteration = t;
        last = Some((decoded, samples, layout));
    }

    let (decoded, samples, layout) = last.expect("at least one round ran");
    let h = repair_one_hot(&decoded.h, &samples, |l, j| layout.h(l, j));
    let labels = (0..data.len())
        .map(|j| (0..k).find(|&l| h[l][j] == 1).unwrap_or(0))
        .collect();
    Ok(RefinementResult {
        centroids: decoded.centroids,
        h,
        labels,
        one_hot: decoded.one_hot,
        trace: RefinementTrace {
            state,
            iterations,
            delta1: problem.delta1,
            delta2: problem.delta2,
            num_qubits: layout.total_vars(),
            below_tolerance_at,
            raw_h: decoded.h,
        },
    })
}
