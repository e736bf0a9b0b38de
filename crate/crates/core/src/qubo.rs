//! QUBO and Ising problem representations.
//!
//! A [`QuboProblem`] stores a quadratic pseudo-Boolean objective
//!
//! ```text
//! f(x) = constant + sum_i linear[i] x_i + sum_{i<j} quadratic[(i,j)] x_i x_j
//! ```
//!
//! in strict upper-triangular form. Diagonal entries fold into the linear
//! part (`x_i^2 = x_i`) and lower-triangular entries fold onto their
//! transpose, so every objective has exactly one stored representation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest problem the exhaustive oracle accepts.
pub const ORACLE_MAX_VARS: usize = 24;

/// An ordered assignment of binary variables.
///
/// Ordering is lexicographic with bit 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Decodes `code` so that bit 0 holds its most significant bit.
    pub fn from_code(code: u64, len: usize) -> Self {
        Self(
            (0..len)
                .map(|i| ((code >> (len - 1 - i)) & 1) as u8)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, index: usize) -> u8 {
        self.0[index]
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl From<Vec<u8>> for BitVector {
    fn from(bits: Vec<u8>) -> Self {
        Self::new(bits)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Decode(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_finite(value: f64, term: impl FnOnce() -> String) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { term: term() })
    }
}

/// Sparse quadratic unconstrained binary optimization problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuboProblem {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    constant: f64,
}

impl QuboProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn linear_coef(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    pub fn quadratic_coef(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.num_vars {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            })
        }
    }

    pub fn add_constant(&mut self, value: f64) -> Result<()> {
        check_finite(value, || "constant".into())?;
        self.constant += value;
        Ok(())
    }

    pub fn add_linear(&mut self, i: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        check_finite(value, || format!("x{i}"))?;
        *self.linear.entry(i).or_insert(0.0) += value;
        Ok(())
    }

    /// Adds `value * x_i * x_j`. `i == j` folds into the linear term and
    /// `(j, i)` is stored as `(i, j)`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i == j {
            return self.add_linear(i, value);
        }
        self.check_index(i)?;
        self.check_index(j)?;
        check_finite(value, || format!("x{i}*x{j}"))?;
        let key = if i < j { (i, j) } else { (j, i) };
        *self.quadratic.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    /// Builds a problem from a dense, possibly full, square matrix.
    pub fn from_dense(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        let mut q = Self::new(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    q.add_quadratic(i, j, v)?;
                }
            }
        }
        Ok(q)
    }

    /// Multiplies every coefficient, including the constant, by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            num_vars: self.num_vars,
            linear: self.linear.iter().map(|(&k, &v)| (k, v * factor)).collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|(&k, &v)| (k, v * factor))
                .collect(),
            constant: self.constant * factor,
        }
    }

    /// Largest absolute linear or quadratic coefficient (0 for an empty problem).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Objective value of `assignment`, summed in fixed index order.
    pub fn energy(&self, assignment: &BitVector) -> Result<f64> {
        if assignment.len() != self.num_vars {
            return Err(Error::Dimension {
                expected: self.num_vars,
                found: assignment.len(),
            });
        }
        Ok(self.energy_unchecked(assignment.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, x: &[u8]) -> f64 {
        let mut e = self.constant;
        for (&i, &c) in &self.linear {
            if x[i] == 1 {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if x[i] == 1 && x[j] == 1 {
                e += c;
            }
        }
        e
    }

    /// Exhaustive minimum over all `2^n` assignments.
    ///
    /// Exact ties resolve to the lexicographically smallest assignment.
    pub fn brute_force_minimum(&self) -> Result<(BitVector, f64)> {
        let n = self.num_vars;
        if n > ORACLE_MAX_VARS {
            return Err(Error::OracleTooLarge {
                num_vars: n,
                max: ORACLE_MAX_VARS,
            });
        }
        if n == 0 {
            return Ok((BitVector::default(), self.constant));
        }
        let mask = |i: usize| 1u32 << (n - 1 - i);
        let linear: Vec<(u32, f64)> = self.linear.iter().map(|(&i, &c)| (mask(i), c)).collect();
        let pairs: Vec<(u32, f64)> = self
            .quadratic
            .iter()
            .map(|(&(i, j), &c)| (mask(i) | mask(j), c))
            .collect();
        let eval = |code: u32| {
            let mut e = self.constant;
            for &(m, c) in &linear {
                if code & m == m {
                    e += c;
                }
            }
            for &(m, c) in &pairs {
                if code & m == m {
                    e += c;
                }
            }
            e
        };

        let total = 1u64 << n;
        let chunk_bits = n.min(12);
        let chunk = 1u64 << chunk_bits;
        let (code, energy) = (0..total / chunk)
            .into_par_iter()
            .map(|c| {
                let start = c * chunk;
                let mut best = (start, eval(start as u32));
                for code in start + 1..start + chunk {
                    let e = eval(code as u32);
                    if e < best.1 {
                        best = (code, e);
                    }
                }
                best
            })
            .reduce(
                || (u64::MAX, f64::INFINITY),
                |a, b| {
                    if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                        b
                    } else {
                        a
                    }
                },
            );
        Ok((BitVector::from_code(code, n), energy))
    }

    /// Rewrites the problem over spins via `x_i = (1 + s_i) / 2`.
    pub fn to_ising(&self) -> IsingProblem {
        let mut ising = IsingProblem::new(self.num_vars);
        for (&i, &c) in &self.linear {
            ising.constant += c / 2.0;
            *ising.field.entry(i).or_insert(0.0) += c / 2.0;
        }
        for (&(i, j), &c) in &self.quadratic {
            let q = c / 4.0;
            ising.constant += q;
            *ising.field.entry(i).or_insert(0.0) += q;
            *ising.field.entry(j).or_insert(0.0) += q;
            *ising.coupling.entry((i, j)).or_insert(0.0) += q;
        }
        ising.constant += self.constant;
        ising
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct QuboJson {
    num_vars: usize,
    #[serde(default)]
    linear: BTreeMap<String, f64>,
    #[serde(default)]
    quadratic: BTreeMap<String, f64>,
    #[serde(default)]
    constant: f64,
}

fn parse_index(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Decode(format!("invalid variable index {s:?}")))
}

impl TryFrom<QuboJson> for QuboProblem {
    type Error = Error;

    fn try_from(raw: QuboJson) -> Result<Self> {
        let mut q = QuboProblem::new(raw.num_vars);
        q.add_constant(raw.constant)?;
        for (k, v) in raw.linear {
            q.add_linear(parse_index(&k)?, v)?;
        }
        for (k, v) in raw.quadratic {
            let (a, b) = k
                .split_once(',')
                .ok_or_else(|| Error::Decode(format!("invalid pair key {k:?}")))?;
            q.add_quadratic(parse_index(a)?, parse_index(b)?, v)?;
        }
        Ok(q)
    }
}

impl Serialize for QuboProblem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuboJson {
            num_vars: self.num_vars,
            linear: self
                .linear
                .iter()
                .map(|(i, c)| (i.to_string(), *c))
                .collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|((i, j), c)| (format!("{i},{j}"), *c))
                .collect(),
            constant: self.constant,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuboProblem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        QuboJson::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

/// Ising problem over spins `s_i in {-1, +1}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IsingProblem {
    pub num_spins: usize,
    pub field: BTreeMap<usize, f64>,
    pub coupling: BTreeMap<(usize, usize), f64>,
    pub constant: f64,
}

impl IsingProblem {
    pub fn new(num_spins: usize) -> Self {
        Self {
            num_spins,
            ..Self::default()
        }
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_spins {
            return Err(Error::Dimension {
                expected: self.num_spins,
                found: spins.len(),
            });
        }
        let mut e = self.constant;
        for (&i, &h) in &self.field {
            e += h * spins[i] as f64;
        }
        for (&(i, j), &c) in &self.coupling {
            e += c * (spins[i] * spins[j]) as f64;
        }
        Ok(e)
    }
}

/// Maps bits to spins with `0 -> -1`, `1 -> +1`.
pub fn bits_to_spins(bits: &BitVector) -> Vec<i8> {
    bits.as_slice().iter().map(|&b| 2 * b as i8 - 1).collect()
}

/// Adjacency view of a [`QuboProblem`] for local-search samplers.
#[derive(Debug, Clone)]
pub struct SparseQubo {
    pub linear: Vec<f64>,
    pub neighbors: Vec<Vec<(usize, f64)>>,
}

impl SparseQubo {
    pub fn new(problem: &QuboProblem) -> Self {
        let n = problem.num_vars();
        let mut linear = vec![0.0; n];
        for (&i, &c) in problem.linear() {
            linear[i] = c;
        }
        let mut neighbors = vec![Vec::new(); n];
        for (&(i, j), &c) in problem.quadratic() {
            neighbors[i].push((j, c));
            neighbors[j].push((i, c));
        }
        Self { linear, neighbors }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    /// Energy change per variable flip: `(1 - 2 x_i) * (l_i + sum_j Q_ij x_j)`
    /// is the delta; this returns the bracketed local field for every `i`.
    pub fn local_fields(&self, x: &[u8]) -> Vec<f64> {
        (0..self.num_vars())
            .map(|i| {
                self.linear[i]
                    + self.neighbors[i]
                        .iter()
                        .filter(|(j, _)| x[*j] == 1)
                        .map(|(_, c)| c)
                        .sum::<f64>()
            })
            .collect()
    }

    /// Flips `x_i` and updates neighbour fields in place.
    #[inline]
    pub fn flip(&self, x: &mut [u8], fields: &mut [f64], i: usize) {
        let sign = if x[i] == 0 { 1.0 } else { -1.0 };
        x[i] ^= 1;
        for &(j, c) in &self.neighbors[i] {
            fields[j] += sign * c;
        }
    }
}
