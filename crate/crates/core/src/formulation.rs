//! Centroid-seeding QUBO.
//!
//! The data matrix `V` (d features x n samples) is approximated by `W H`
//! where `W` (d x k) holds grid-encoded real centroids and `H` (k x n) is a
//! binary assignment matrix with one-hot columns. The squared residual
//! `sum_j ||v_j - W h_j||^2` is expanded into a pseudo-Boolean polynomial,
//! cubic terms are quadratized with auxiliary qubits, and a one-hot
//! penalty on the columns of `H` is added.
//!
//! Variable order is fixed: every `W` qubit (row-major over `(a, b)`, most
//! significant bit first), then every `H` qubit (row-major over `(l, j)`),
//! then auxiliary qubits in creation order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encoding::{to_real, ScaleOffsetEntry, WeightGrid};
use crate::error::{Error, Result};
use crate::qubo::{BitVector, QuboProblem};

/// Polynomial over binary variables; keys are strictly increasing index
/// tuples (the empty tuple is the constant).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PseudoBooleanPoly {
    num_vars: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

impl PseudoBooleanPoly {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, value: f64) -> Self {
        let mut p = Self::new(num_vars);
        p.add_term(&[], value);
        p
    }

    pub fn variable(num_vars: usize, index: usize, coef: f64) -> Self {
        let mut p = Self::new(num_vars);
        p.add_term(&[index], coef);
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    /// Adds `coef * prod(vars)`, applying `x^2 = x`.
    pub fn add_term(&mut self, vars: &[usize], coef: f64) {
        if coef == 0.0 {
            return;
        }
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        debug_assert!(key.last().is_none_or(|&v| v < self.num_vars));
        let slot = self.terms.entry(key).or_insert(0.0);
        *slot += coef;
    }

    pub fn coef(&self, vars: &[usize]) -> f64 {
        self.terms.get(vars).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&mut self, other: &Self) {
        for (k, &v) in &other.terms {
            self.add_term(k, v);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.terms.values_mut() {
            *v *= factor;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new(self.num_vars.max(other.num_vars));
        for (ka, &va) in &self.terms {
            for (kb, &vb) in &other.terms {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                out.add_term(&key, va * vb);
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[u8]) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&i| x[i] == 1))
            .map(|(_, v)| v)
            .sum()
    }
}

/// An auxiliary qubit standing in for the product of two parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxVar {
    pub index: usize,
    pub parents: (usize, usize),
}

/// Mapping from matrix entries to QUBO variable indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableLayout {
    pub features: usize,
    pub clusters: usize,
    pub samples: usize,
    pub bits: usize,
    /// Indexed by `a * clusters + b`; each group lists qubits high bit first.
    pub w_qubits: Vec<Vec<usize>>,
    /// Indexed by `l * samples + j`.
    pub h_qubits: Vec<usize>,
    pub aux: Vec<AuxVar>,
}

impl VariableLayout {
    pub fn new(features: usize, clusters: usize, samples: usize, bits: usize) -> Self {
        let entries = features * clusters;
        let w_qubits = (0..entries)
            .map(|e| (e * bits..(e + 1) * bits).collect())
            .collect();
        let base = entries * bits;
        let h_qubits = (base..base + clusters * samples).collect();
        Self {
            features,
            clusters,
            samples,
            bits,
            w_qubits,
            h_qubits,
            aux: Vec::new(),
        }
    }

    pub fn num_weights(&self) -> usize {
        self.features * self.clusters
    }

    pub fn w_group(&self, a: usize, b: usize) -> &[usize] {
        &self.w_qubits[a * self.clusters + b]
    }

    pub fn h(&self, l: usize, j: usize) -> usize {
        self.h_qubits[l * self.samples + j]
    }

    /// Number of `W` and `H` qubits.
    pub fn num_base_vars(&self) -> usize {
        self.num_weights() * self.bits + self.clusters * self.samples
    }

    pub fn total_vars(&self) -> usize {
        self.num_base_vars() + self.aux.len()
    }

    /// Human-readable names (`w[a][b].bit[t]`, `h[l][j]`, `aux[m]`).
    pub fn names(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for a in 0..self.features {
            for b in 0..self.clusters {
                for (t, &q) in self.w_group(a, b).iter().enumerate() {
                    out.insert(format!("w[{a}][{b}].bit[{t}]"), q);
                }
            }
        }
        for l in 0..self.clusters {
            for j in 0..self.samples {
                out.insert(format!("h[{l}][{j}]"), self.h(l, j));
            }
        }
        for (m, aux) in self.aux.iter().enumerate() {
            out.insert(format!("aux[{m}]"), aux.index);
        }
        out
    }

    pub fn names_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.names())?)
    }
}

/// Penalty weight that dominates any objective gain from violating a
/// constraint on small instances: `10 * (1 + max_j ||v_j||^2)`.
pub fn default_penalty(data: &[Vec<f64>]) -> f64 {
    let max_sq = data
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>())
        .fold(0.0, f64::max);
    10.0 * (1.0 + max_sq)
}

/// Inputs for one centroid-seeding QUBO.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidProblem {
    /// Samples (columns of `V`), each of length `d`.
    pub data: Vec<Vec<f64>>,
    pub k: usize,
    pub grid: WeightGrid,
    pub delta1: f64,
    pub delta2: f64,
    pub lambda: f64,
    pub global_offset: f64,
    /// Keep the `h_bj h_b'j` cross products of the residual expansion.
    /// They vanish on every assignment with at most one `1` per column, so
    /// dropping them (the default) leaves the objective exact wherever the
    /// one-hot penalty is satisfied and keeps the polynomial cubic.
    pub cross_terms: bool,
}

impl CentroidProblem {
    /// Builds a problem with default penalties, unit scale and no offset.
    pub fn new(data: Vec<Vec<f64>>, k: usize, grid: WeightGrid) -> Result<Self> {
        let delta = default_penalty(&data);
        let p = Self {
            data,
            k,
            grid,
            delta1: delta,
            delta2: delta,
            lambda: 1.0,
            global_offset: 0.0,
            cross_terms: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_penalties(mut self, delta1: f64, delta2: f64) -> Result<Self> {
        self.delta1 = delta1;
        self.delta2 = delta2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_scaling(mut self, lambda: f64, global_offset: f64) -> Result<Self> {
        self.lambda = lambda;
        self.global_offset = global_offset;
        self.validate()?;
        Ok(self)
    }

    /// Raises `delta1` to at least twice the [`substitution_bound`] of the
    /// objective built from `state`. Later refinement states only shrink
    /// the scales, so a bound taken at the initial state stays valid.
    pub fn certify_delta1(&mut self, state: &[ScaleOffsetEntry]) -> Result<()> {
        let bound = substitution_bound(&build_objective(self, state)?)?;
        self.delta1 = self.delta1.max(2.0 * bound);
        Ok(())
    }

    /// Raises `delta2` to at least twice [`one_hot_bound`] for `state`.
    /// Refined grids stay inside the initial one, so the initial bound
    /// covers later states too.
    pub fn certify_delta2(&mut self, state: &[ScaleOffsetEntry]) -> Result<()> {
        let bound = one_hot_bound(self, state)?;
        self.delta2 = self.delta2.max(2.0 * bound);
        Ok(())
    }

    pub fn with_cross_terms(mut self, cross_terms: bool) -> Self {
        self.cross_terms = cross_terms;
        self
    }

    pub fn features(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn samples(&self) -> usize {
        self.data.len()
    }

    pub fn num_weights(&self) -> usize {
        self.features() * self.k
    }

    pub fn layout(&self) -> VariableLayout {
        VariableLayout::new(
            self.features(),
            self.k,
            self.samples(),
            self.grid.bits() as usize,
        )
    }

    fn validate(&self) -> Result<()> {
        let d = self.features();
        if d == 0 {
            return Err(Error::Config("data needs at least one feature".into()));
        }
        if self.k == 0 || self.samples() < self.k {
            return Err(Error::Config(format!(
                "need 1 <= k <= n, got k = {} with n = {}",
                self.k,
                self.samples()
            )));
        }
        if let Some(bad) = self.data.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                found: bad.len(),
            });
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Config("data contains non-finite values".into()));
        }
        for (name, v) in [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("lambda", self.lambda),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.global_offset.is_finite() {
            return Err(Error::Config("global offset must be finite".into()));
        }
        Ok(())
    }
}

fn check_state(problem: &CentroidProblem, state: &[ScaleOffsetEntry]) -> Result<()> {
    if state.len() != problem.num_weights() {
        return Err(Error::Layout(format!(
            "expected {} scale/offset entries, got {}",
            problem.num_weights(),
            state.len()
        )));
    }
    Ok(())
}

/// Linear form `scale * sum_t c_t q_t + offset` for one `W` entry.
fn weight_poly(
    num_vars: usize,
    group: &[usize],
    weights: &[i64],
    entry: ScaleOffsetEntry,
) -> PseudoBooleanPoly {
    let mut p = PseudoBooleanPoly::constant(num_vars, entry.offset);
    for (&q, &c) in group.iter().zip(weights) {
        p.add_term(&[q], entry.scale * c as f64);
    }
    p
}

/// Expands `sum_j ||v_j - W h_j||^2` over the base (`W` and `H`) qubits.
/// Constants are kept, so the polynomial evaluates to the true squared
/// residual on every one-hot assignment.
pub fn build_objective(
    problem: &CentroidProblem,
    state: &[ScaleOffsetEntry],
) -> Result<PseudoBooleanPoly> {
    check_state(problem, state)?;
    let layout = problem.layout();
    let nv = layout.num_base_vars();
    let weights = problem.grid.qubit_weights();
    let k = problem.k;

    let mut objective = PseudoBooleanPoly::new(nv);
    for a in 0..layout.features {
        let w: Vec<PseudoBooleanPoly> = (0..k)
            .map(|b| weight_poly(nv, layout.w_group(a, b), &weights, state[a * k + b]))
            .collect();
        let w_sq: Vec<PseudoBooleanPoly> = w.iter().map(|p| p.mul(p)).collect();
        for (j, sample) in problem.data.iter().enumerate() {
            let v = sample[a];
            if problem.cross_terms {
                // (v - sum_b w_b h_b)^2
                let mut residual = PseudoBooleanPoly::constant(nv, v);
                for (b, wb) in w.iter().enumerate() {
                    let mut t = wb.mul(&PseudoBooleanPoly::variable(nv, layout.h(b, j), 1.0));
                    t.scale(-1.0);
                    residual.add(&t);
                }
                objective.add(&residual.mul(&residual));
            } else {
                // v^2 + sum_b (w_b^2 - 2 v w_b) h_b
                objective.add_term(&[], v * v);
                for b in 0..k {
                    let h = layout.h(b, j);
                    for (key, &c) in w_sq[b].terms() {
                        let mut vars = key.clone();
                        vars.push(h);
                        objective.add_term(&vars, c);
                    }
                    for (key, &c) in w[b].terms() {
                        let mut vars = key.clone();
                        vars.push(h);
                        objective.add_term(&vars, -2.0 * v * c);
                    }
                }
            }
        }
    }
    Ok(objective)
}

type TermMap = BTreeMap<Vec<usize>, f64>;

/// Product substitution without penalties: returns the rewritten terms and
/// the auxiliary qubits introduced.
fn substitute_products(poly: &PseudoBooleanPoly) -> Result<(TermMap, Vec<AuxVar>)> {
    let degree = poly.degree();
    if degree > 4 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let mut terms = poly.terms.clone();
    let mut aux = Vec::new();
    let mut next = poly.num_vars;

    loop {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for key in terms.keys().filter(|k| k.len() >= 3) {
            for (x, &i) in key.iter().enumerate() {
                for &j in &key[x + 1..] {
                    *counts.entry((i, j)).or_insert(0) += 1;
                }
            }
        }
        // highest count, smallest pair on ties
        let Some((&(i, j), _)) = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        else {
            break;
        };
        let y = next;
        next += 1;
        aux.push(AuxVar {
            index: y,
            parents: (i, j),
        });

        let targets: Vec<Vec<usize>> = terms
            .keys()
            .filter(|k| k.len() >= 3 && k.contains(&i) && k.contains(&j))
            .cloned()
            .collect();
        for key in targets {
            let coef = terms.remove(&key).unwrap_or(0.0);
            let mut reduced: Vec<usize> = key.into_iter().filter(|&v| v != i && v != j).collect();
            reduced.push(y);
            *terms.entry(reduced).or_insert(0.0) += coef;
        }
    }
    Ok((terms, aux))
}

/// Largest total absolute coefficient carried by any single auxiliary
/// qubit after substitution. A `delta1` above this makes every substitution
/// exact at the minimum: violating a set of substitutions gains less than
/// the penalty it incurs.
pub fn substitution_bound(poly: &PseudoBooleanPoly) -> Result<f64> {
    let (terms, aux) = substitute_products(poly)?;
    Ok(aux
        .iter()
        .map(|a| {
            terms
                .iter()
                .filter(|(k, _)| k.contains(&a.index))
                .map(|(_, c)| c.abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max))
}

/// Largest objective increase from forcing one `H` column to be one-hot
/// while `W` stays fixed: `max_j (max_w ||v_j - w||^2 + (k - 1) ||v_j||^2)`,
/// with `w` ranging over the box spanned by the grid. Any column with `m`
/// ones other than one pays `delta2 * (m - 1)^2 >= delta2`, so a `delta2`
/// above this bound makes every minimum one-hot.
pub fn one_hot_bound(problem: &CentroidProblem, state: &[ScaleOffsetEntry]) -> Result<f64> {
    check_state(problem, state)?;
    let (lo_code, hi_code) = problem.grid.code_range();
    let k = problem.k;
    let mut bound = 0.0f64;
    for v in &problem.data {
        let mut far = 0.0;
        for (a, &va) in v.iter().enumerate() {
            let mut worst = 0.0f64;
            for b in 0..k {
                let e = state[a * k + b];
                for code in [lo_code, hi_code] {
                    worst = worst.max((va - to_real(code, e)).powi(2));
                }
            }
            far += worst;
        }
        let norm: f64 = v.iter().map(|x| x * x).sum();
        bound = bound.max(far + (k - 1) as f64 * norm);
    }
    Ok(bound)
}

/// Quadratizes `poly` by repeated product substitution.
///
/// While any term has degree three or more, the pair of variables that
/// co-occurs in the most such terms (ties to the smallest pair) is replaced
/// by a fresh qubit `y`, and `delta1 * (x_i x_j - 2 x_i y - 2 x_j y + 3 y)`
/// is added. The penalty is zero exactly when `y = x_i x_j`.
pub fn reduce_to_quadratic(
    poly: &PseudoBooleanPoly,
    delta1: f64,
) -> Result<(QuboProblem, Vec<AuxVar>)> {
    let (mut terms, aux) = substitute_products(poly)?;
    for a in &aux {
        let (i, j) = a.parents;
        let y = a.index;
        *terms.entry(vec![i, j]).or_insert(0.0) += delta1;
        *terms.entry(vec![i, y]).or_insert(0.0) += -2.0 * delta1;
        *terms.entry(vec![j, y]).or_insert(0.0) += -2.0 * delta1;
        *terms.entry(vec![y]).or_insert(0.0) += 3.0 * delta1;
    }

    let mut qubo = QuboProblem::new(poly.num_vars + aux.len());
    for (key, &c) in &terms {
        match key.as_slice() {
            [] => qubo.add_constant(c)?,
            [i] => qubo.add_linear(*i, c)?,
            [i, j] => qubo.add_quadratic(*i, *j, c)?,
            _ => unreachable!("all higher-degree terms were substituted"),
        }
    }
    Ok((qubo, aux))
}

/// `delta2 * sum_j (sum_l h_lj - 1)^2`, expanded.
pub fn one_hot_penalty(layout: &VariableLayout, delta2: f64) -> PseudoBooleanPoly {
    let mut p = PseudoBooleanPoly::new(layout.total_vars());
    for j in 0..layout.samples {
        p.add_term(&[], delta2);
        for l in 0..layout.clusters {
            p.add_term(&[layout.h(l, j)], -delta2);
            for m in l + 1..layout.clusters {
                p.add_term(&[layout.h(l, j), layout.h(m, j)], 2.0 * delta2);
            }
        }
    }
    p
}

/// Full QUBO: `lambda * (quadratized objective + one-hot penalty) + offset`.
pub fn assemble(
    problem: &CentroidProblem,
    state: &[ScaleOffsetEntry],
) -> Result<(QuboProblem, VariableLayout)> {
    let objective = build_objective(problem, state)?;
    let (mut qubo, aux) = reduce_to_quadratic(&objective, problem.delta1)?;
    let mut layout = problem.layout();
    layout.aux = aux;
    for (key, &c) in one_hot_penalty(&layout, problem.delta2).terms() {
        match key.as_slice() {
            [] => qubo.add_constant(c)?,
            [i] => qubo.add_linear(*i, c)?,
            [i, j] => qubo.add_quadratic(*i, *j, c)?,
            _ => unreachable!("penalty is quadratic"),
        }
    }
    let mut qubo = if problem.lambda == 1.0 {
        qubo
    } else {
        qubo.scaled(problem.lambda)
    };
    qubo.add_constant(problem.global_offset)?;
    Ok((qubo, layout))
}

/// Real centroids and assignment matrix read from a solver bit-string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedSolution {
    /// Columns of `W`: `centroids[b][a]`.
    pub centroids: Vec<Vec<f64>>,
    /// Integer code of every `W` entry, indexed `a * k + b`.
    pub codes: Vec<i64>,
    /// `h[l][j]`.
    pub h: Vec<Vec<u8>>,
    /// Every column of `H` has exactly one `1`.
    pub one_hot: bool,
    /// Every auxiliary qubit equals the product of its parents.
    pub aux_consistent: bool,
}

impl DecodedSolution {
    /// Cluster index per sample; `None` where the column is not one-hot.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let n = self.h.first().map_or(0, Vec::len);
        (0..n)
            .map(|j| {
                let ones: Vec<usize> = (0..self.h.len()).filter(|&l| self.h[l][j] == 1).collect();
                (ones.len() == 1).then(|| ones[0])
            })
            .collect()
    }
}

pub fn decode_solution(
    best: &BitVector,
    layout: &VariableLayout,
    grid: &WeightGrid,
    state: &[ScaleOffsetEntry],
) -> Result<DecodedSolution> {
    if best.len() != layout.total_vars() {
        return Err(Error::Dimension {
            expected: layout.total_vars(),
            found: best.len(),
        });
    }
    if state.len() != layout.num_weights() {
        return Err(Error::Layout(format!(
            "expected {} scale/offset entries, got {}",
            layout.num_weights(),
            state.len()
        )));
    }
    let x = best.as_slice();
    let (d, k, n) = (layout.features, layout.clusters, layout.samples);
    let mut codes = Vec::with_capacity(d * k);
    let mut centroids = vec![vec![0.0; d]; k];
    for a in 0..d {
        for b in 0..k {
            let group: Vec<u8> = layout.w_group(a, b).iter().map(|&q| x[q]).collect();
            let code = grid.decode(&group);
            centroids[b][a] = to_real(code, state[a * k + b]);
            codes.push(code);
        }
    }
    let h: Vec<Vec<u8>> = (0..k)
        .map(|l| (0..n).map(|j| x[layout.h(l, j)]).collect())
        .collect();
    let one_hot = (0..n).all(|j| (0..k).map(|l| h[l][j] as usize).sum::<usize>() == 1);
    let aux_consistent = layout
        .aux
        .iter()
        .all(|a| x[a.index] == x[a.parents.0] & x[a.parents.1]);
    Ok(DecodedSolution {
        centroids,
        codes,
        h,
        one_hot,
        aux_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::initial_scale;

    fn unsigned(bits: u32) -> WeightGrid {
        WeightGrid::unsigned(bits).unwrap()
    }

    fn entry(scale: f64, offset: f64) -> ScaleOffsetEntry {
        ScaleOffsetEntry::new(scale, offset).unwrap()
    }

    #[test]
    fn single_bit_objective() {
        // (2 - q h)^2 = 4 - 3 q h with q = var 0, h = var 1.
        let p = CentroidProblem::new(vec![vec![2.0]], 1, unsigned(1)).unwrap();
        let poly = build_objective(&p, &[entry(1.0, 0.0)]).unwrap();
        let mut expected = PseudoBooleanPoly::new(2);
        expected.add_term(&[], 4.0);
        expected.add_term(&[0, 1], -3.0);
        assert_eq!(poly, expected);

        let p = CentroidProblem::new(vec![vec![0.0]], 1, unsigned(1)).unwrap();
        let poly = build_objective(&p, &[entry(1.0, 0.0)]).unwrap();
        let mut expected = PseudoBooleanPoly::new(2);
        expected.add_term(&[0, 1], 1.0);
        assert_eq!(poly, expected);
    }

    #[test]
    fn offset_only_objective() {
        // With the value qubit pinned to 0 the weight is the offset alone:
        // (c - o h)^2 = c^2 - (2 c o - o^2) h.
        let (c, o) = (3.0, 1.25);
        let p = CentroidProblem::new(vec![vec![c]], 1, unsigned(1)).unwrap();
        let poly = build_objective(&p, &[entry(1.0, o)]).unwrap();
        assert_eq!(poly.coef(&[]), c * c);
        assert_eq!(poly.coef(&[1]), -(2.0 * c * o - o * o));
        for h in 0..2u8 {
            let direct = (c - o * h as f64).powi(2);
            assert!((poly.evaluate(&[0, h]) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn state_length_is_checked() {
        let p = CentroidProblem::new(vec![vec![1.0], vec![2.0]], 2, unsigned(2)).unwrap();
        assert!(matches!(
            build_objective(&p, &[entry(1.0, 0.0)]),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn cubic_substitution_example() {
        let mut poly = PseudoBooleanPoly::new(3);
        poly.add_term(&[0, 1, 2], 2.0);
        let (q, aux) = reduce_to_quadratic(&poly, 10.0).unwrap();
        assert_eq!(
            aux,
            vec![AuxVar {
                index: 3,
                parents: (0, 1)
            }]
        );
        assert_eq!(q.num_vars(), 4);
        assert_eq!(q.quadratic_coef(2, 3), 2.0);
        assert_eq!(q.quadratic_coef(0, 1), 10.0);
        assert_eq!(q.quadratic_coef(0, 3), -20.0);
        assert_eq!(q.quadratic_coef(1, 3), -20.0);
        assert_eq!(q.linear_coef(3), 30.0);
        assert_eq!(q.quadratic().len(), 4);
        assert_eq!(q.linear().len(), 1);

        let (_, min_q) = q.brute_force_minimum().unwrap();
        let min_poly = (0..8u64)
            .map(|c| poly.evaluate(BitVector::from_code(c, 3).as_slice()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min_q, min_poly);
    }

    #[test]
    fn quadratic_poly_passes_through() {
        let mut poly = PseudoBooleanPoly::new(3);
        poly.add_term(&[], 1.0);
        poly.add_term(&[0], -2.0);
        poly.add_term(&[1, 2], 0.5);
        let (q, aux) = reduce_to_quadratic(&poly, 10.0).unwrap();
        assert!(aux.is_empty());
        assert_eq!(q.num_vars(), 3);
        assert_eq!(q.constant(), 1.0);
        assert_eq!(q.linear_coef(0), -2.0);
        assert_eq!(q.quadratic_coef(1, 2), 0.5);
    }

    #[test]
    fn rejects_degree_five() {
        let mut poly = PseudoBooleanPoly::new(5);
        poly.add_term(&[0, 1, 2, 3, 4], 1.0);
        assert!(matches!(
            reduce_to_quadratic(&poly, 1.0),
            Err(Error::UnsupportedDegree(5))
        ));
    }

    #[test]
    fn quartic_reduces() {
        let mut poly = PseudoBooleanPoly::new(4);
        poly.add_term(&[0, 1, 2, 3], -3.0);
        poly.add_term(&[0, 1, 2], 1.0);
        poly.add_term(&[3], 0.5);
        let (q, aux) = reduce_to_quadratic(&poly, 50.0).unwrap();
        assert_eq!(aux.len(), 2);
        let min_poly = (0..16u64)
            .map(|c| poly.evaluate(BitVector::from_code(c, 4).as_slice()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(q.brute_force_minimum().unwrap().1, min_poly);
    }

    #[test]
    fn one_hot_penalty_two_clusters() {
        let layout = VariableLayout::new(1, 2, 1, 1);
        let p = one_hot_penalty(&layout, 1.0);
        let (h0, h1) = (layout.h(0, 0), layout.h(1, 0));
        assert_eq!(p.coef(&[]), 1.0);
        assert_eq!(p.coef(&[h0]), -1.0);
        assert_eq!(p.coef(&[h1]), -1.0);
        assert_eq!(p.coef(&[h0, h1]), 2.0);
        let score = |a: u8, b: u8| {
            let mut x = vec![0u8; layout.total_vars()];
            x[h0] = a;
            x[h1] = b;
            p.evaluate(&x)
        };
        assert_eq!(score(1, 0), 0.0);
        assert_eq!(score(0, 1), 0.0);
        assert_eq!(score(0, 0), 1.0);
        assert_eq!(score(1, 1), 1.0);

        let doubled = one_hot_penalty(&layout, 2.0);
        for (k, v) in p.terms() {
            assert_eq!(doubled.coef(k), 2.0 * v);
        }
    }

    #[test]
    fn one_hot_penalty_single_cluster() {
        let layout = VariableLayout::new(1, 1, 1, 1);
        let p = one_hot_penalty(&layout, 3.0);
        let h = layout.h(0, 0);
        let mut x = vec![0u8; layout.total_vars()];
        assert_eq!(p.evaluate(&x), 3.0);
        x[h] = 1;
        assert_eq!(p.evaluate(&x), 0.0);
    }

    #[test]
    fn lambda_scales_every_coefficient() {
        let data = vec![vec![1.0], vec![-2.0], vec![0.5]];
        let base = CentroidProblem::new(data, 2, unsigned(2)).unwrap();
        let state = vec![entry(initial_scale(3.0, -3.0, 2).unwrap(), -3.0); 2];
        let (q1, _) = assemble(&base, &state).unwrap();
        let (q2, _) = assemble(&base.clone().with_scaling(2.0, 0.0).unwrap(), &state).unwrap();
        for (k, v) in q1.linear() {
            assert_eq!(q2.linear()[k], 2.0 * v);
        }
        for (k, v) in q1.quadratic() {
            assert_eq!(q2.quadratic()[k], 2.0 * v);
        }
        let (q3, _) = assemble(&base.with_scaling(1.0, 5.0).unwrap(), &state).unwrap();
        assert_eq!(q3.constant(), q1.constant() + 5.0);
    }

    #[test]
    fn layout_names_and_order() {
        let layout = VariableLayout::new(2, 2, 3, 2);
        let names = layout.names();
        assert_eq!(names["w[0][0].bit[0]"], 0);
        assert_eq!(names["w[0][1].bit[1]"], 3);
        assert_eq!(names["w[1][1].bit[1]"], 7);
        assert_eq!(names["h[0][0]"], 8);
        assert_eq!(names["h[1][2]"], 13);
        assert_eq!(layout.total_vars(), 14);
    }

    #[test]
    fn all_zero_decode() {
        let p = CentroidProblem::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]], 2, unsigned(2)).unwrap();
        let state = vec![entry(1.0, -3.0); 4];
        let (q, layout) = assemble(&p, &state).unwrap();
        let decoded =
            decode_solution(&BitVector::zeros(q.num_vars()), &layout, &p.grid, &state).unwrap();
        assert!(decoded.centroids.iter().flatten().all(|&w| w == -3.0));
        assert!(decoded.h.iter().flatten().all(|&h| h == 0));
        assert!(!decoded.one_hot);
        assert!(decoded.aux_consistent);
        assert!(decode_solution(&BitVector::zeros(3), &layout, &p.grid, &state).is_err());
    }

    #[test]
    fn default_delta1_can_be_too_small() {
        // One sample, four bits: the (q0, h) substitution carries
        // 2 * 8 * (4 + 2 + 1) = 112 of coefficient mass, above 10 * (1 + 2.6^2).
        let p = CentroidProblem::new(vec![vec![2.6]], 1, unsigned(4)).unwrap();
        let state = [entry(1.0, -8.0)];
        let bound = substitution_bound(&build_objective(&p, &state).unwrap()).unwrap();
        assert_eq!(bound, 112.0);
        assert!(p.delta1 < bound);
        let mut certified = p.clone();
        certified.certify_delta1(&state).unwrap();
        assert_eq!(certified.delta1, 224.0);
    }

    #[test]
    fn default_delta2_can_be_too_small() {
        // Grid {-8, 7} far from both points: leaving the columns empty costs
        // 2 * delta2 + ||V||^2, less than any one-hot assignment.
        let data = vec![vec![-1.4], vec![1.1]];
        let state = [entry(15.0, -8.0)];
        let p = CentroidProblem::new(data, 1, unsigned(1)).unwrap();
        let (q, layout) = assemble(&p, &state).unwrap();
        let (best, _) = q.brute_force_minimum().unwrap();
        assert!(
            !decode_solution(&best, &layout, &p.grid, &state)
                .unwrap()
                .one_hot
        );

        let mut certified = p.clone();
        certified.certify_delta2(&state).unwrap();
        // max over points of the squared distance to the far grid end.
        assert_eq!(certified.delta2, 2.0 * (1.1f64 + 8.0).powi(2));
        let (q, layout) = assemble(&certified, &state).unwrap();
        let (best, _) = q.brute_force_minimum().unwrap();
        assert!(
            decode_solution(&best, &layout, &p.grid, &state)
                .unwrap()
                .one_hot
        );
    }

    #[test]
    fn single_point_picks_nearest_grid_value() {
        // Grid -8..7 with unit pitch; the oracle lands on round(2.6) = 3.
        let mut p = CentroidProblem::new(vec![vec![2.6]], 1, unsigned(4)).unwrap();
        let state = [entry(1.0, -8.0)];
        p.certify_delta1(&state).unwrap();
        let (q, layout) = assemble(&p, &state).unwrap();
        let (best, energy) = q.brute_force_minimum().unwrap();
        let decoded = decode_solution(&best, &layout, &p.grid, &state).unwrap();
        assert_eq!(decoded.centroids, vec![vec![3.0]]);
        assert_eq!(decoded.codes, vec![11]);
        assert!(decoded.one_hot && decoded.aux_consistent);
        assert!((energy - 0.16).abs() < 1e-9);
    }

    #[test]
    fn signed_grid_objective_matches_direct_evaluation() {
        let codec = crate::encoding::FixedPointCodec::twos_complement(3).unwrap();
        let p = CentroidProblem::new(vec![vec![-2.0], vec![1.5]], 1, WeightGrid::Signed(codec))
            .unwrap();
        let state = [entry(0.5, 0.25)];
        let poly = build_objective(&p, &state).unwrap();
        let layout = p.layout();
        for code in 0..(1u64 << layout.num_base_vars()) {
            let x = BitVector::from_code(code, layout.num_base_vars());
            let w = codec
                .decode_integer(&BitVector::new(
                    layout.w_group(0, 0).iter().map(|&q| x.get(q)).collect(),
                ))
                .unwrap() as f64
                * 0.5
                + 0.25;
            let direct: f64 = p
                .data
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let h = x.get(layout.h(0, j)) as f64;
                    (v[0] - w * h).powi(2)
                })
                .sum();
            assert!((poly.evaluate(x.as_slice()) - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn cross_terms_only_differ_on_multi_hot_columns() {
        let data = vec![vec![1.0, -1.0], vec![0.5, 2.0]];
        let p = CentroidProblem::new(data, 2, unsigned(2)).unwrap();
        let state = vec![entry(2.0, -1.0); 4];
        let sep = build_objective(&p, &state).unwrap();
        let full = build_objective(&p.clone().with_cross_terms(true), &state).unwrap();
        assert_eq!(sep.degree(), 3);
        assert_eq!(full.degree(), 4);
        let layout = p.layout();
        let nv = layout.num_base_vars();
        for code in 0..(1u64 << nv) {
            let x = BitVector::from_code(code, nv);
            let multi_hot = (0..layout.samples)
                .any(|j| (0..2).filter(|&l| x.get(layout.h(l, j)) == 1).count() > 1);
            if !multi_hot {
                assert!((sep.evaluate(x.as_slice()) - full.evaluate(x.as_slice())).abs() < 1e-9);
            }
        }
    }
}
