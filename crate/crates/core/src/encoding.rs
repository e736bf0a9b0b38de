//! Fixed-point binary encoding of real weights.
//!
//! A weight occupies a group of qubits ordered from most to least
//! significant. In the signed form the leading qubit carries a negative
//! weight; the adaptive refinement path reads the same group as an
//! unsigned code `b` and maps it through a per-weight affine
//! `b * scale + offset`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    #[default]
    TwosComplement,
    OnesComplement,
}

/// Signed encoding: one sign qubit followed by `bits - 1` value qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointCodec {
    bits: u32,
    sign_mode: SignMode,
}

impl FixedPointCodec {
    pub fn new(bits: u32, sign_mode: SignMode) -> Result<Self> {
        if !(2..=62).contains(&bits) {
            return Err(Error::Config(format!(
                "codec needs between 2 and 62 qubits, got {bits}"
            )));
        }
        Ok(Self { bits, sign_mode })
    }

    pub fn twos_complement(bits: u32) -> Result<Self> {
        Self::new(bits, SignMode::TwosComplement)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn sign_mode(&self) -> SignMode {
        self.sign_mode
    }

    /// Highest value-qubit power.
    pub fn max_power(&self) -> u32 {
        self.bits - 2
    }

    /// Weight carried by the sign qubit.
    pub fn sign_weight(&self) -> i64 {
        let top = -(1i64 << (self.bits - 1));
        match self.sign_mode {
            SignMode::TwosComplement => top,
            SignMode::OnesComplement => top + 1,
        }
    }

    /// `[sign weight, 2^(bits-2), ..., 2, 1]`.
    pub fn qubit_weights(&self) -> Vec<i64> {
        std::iter::once(self.sign_weight())
            .chain((0..=self.max_power()).rev().map(|p| 1i64 << p))
            .collect()
    }

    /// Inclusive integer range representable by the codec.
    pub fn range(&self) -> (i64, i64) {
        (self.sign_weight(), (1i64 << (self.bits - 1)) - 1)
    }

    pub fn decode_integer(&self, bits_in: &BitVector) -> Result<i64> {
        if bits_in.len() != self.bits as usize {
            return Err(Error::Dimension {
                expected: self.bits as usize,
                found: bits_in.len(),
            });
        }
        Ok(self
            .qubit_weights()
            .iter()
            .zip(bits_in.as_slice())
            .map(|(w, &b)| w * b as i64)
            .sum())
    }

    /// Inverse of [`decode_integer`](Self::decode_integer). In ones'
    /// complement zero encodes as all-zero bits.
    pub fn encode_integer(&self, value: i64) -> Result<BitVector> {
        let (lo, hi) = self.range();
        if value < lo || value > hi {
            return Err(Error::Decode(format!(
                "{value} outside codec range [{lo}, {hi}]"
            )));
        }
        let (sign, mut rest) = if value < 0 {
            (1u8, value - self.sign_weight())
        } else {
            (0u8, value)
        };
        let mut bits = vec![sign];
        for p in (0..=self.max_power()).rev() {
            let w = 1i64 << p;
            if rest >= w {
                bits.push(1);
                rest -= w;
            } else {
                bits.push(0);
            }
        }
        debug_assert_eq!(rest, 0);
        Ok(BitVector::new(bits))
    }
}

/// How each weight's qubit group maps to an integer code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightGrid {
    /// Code `b in [0, 2^bits - 1]`, used by the adaptive refinement loop.
    Unsigned { bits: u32 },
    /// Signed fixed-point code.
    Signed(FixedPointCodec),
}

impl WeightGrid {
    pub fn unsigned(bits: u32) -> Result<Self> {
        if !(1..=62).contains(&bits) {
            return Err(Error::Config(format!(
                "unsigned grid needs between 1 and 62 qubits, got {bits}"
            )));
        }
        Ok(Self::Unsigned { bits })
    }

    pub fn bits(&self) -> u32 {
        match self {
            Self::Unsigned { bits } => *bits,
            Self::Signed(codec) => codec.bits(),
        }
    }

    /// Integer weight of each qubit, most significant first.
    pub fn qubit_weights(&self) -> Vec<i64> {
        match self {
            Self::Unsigned { bits } => (0..*bits).rev().map(|p| 1i64 << p).collect(),
            Self::Signed(codec) => codec.qubit_weights(),
        }
    }

    /// Inclusive range of integer codes.
    pub fn code_range(&self) -> (i64, i64) {
        match self {
            Self::Unsigned { bits } => (0, (1i64 << bits) - 1),
            Self::Signed(codec) => codec.range(),
        }
    }

    pub fn decode(&self, group: &[u8]) -> i64 {
        self.qubit_weights()
            .iter()
            .zip(group)
            .map(|(w, &b)| w * b as i64)
            .sum()
    }
}

/// Per-weight affine map from integer code to real value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleOffsetEntry {
    pub scale: f64,
    pub offset: f64,
}

impl ScaleOffsetEntry {
    pub fn new(scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if !offset.is_finite() {
            return Err(Error::Config(format!(
                "offset must be finite, got {offset}"
            )));
        }
        Ok(Self { scale, offset })
    }

    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            offset: 0.0,
        }
    }
}

pub fn to_real(value: i64, entry: ScaleOffsetEntry) -> f64 {
    value as f64 * entry.scale + entry.offset
}

/// Grid pitch spreading `bits` qubits evenly over `[lower, upper]`.
pub fn initial_scale(upper: f64, lower: f64, bits: u32) -> Result<f64> {
    if upper.partial_cmp(&lower) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Range { upper, lower });
    }
    if bits == 0 || bits > 62 {
        return Err(Error::Config(format!("bit count {bits} out of range")));
    }
    Ok((upper - lower) / ((1u64 << bits) - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn qubit_weight_examples() {
        let four = FixedPointCodec::twos_complement(4).unwrap();
        assert_eq!(four.qubit_weights(), vec![-8, 4, 2, 1]);
        assert_eq!(
            FixedPointCodec::twos_complement(2).unwrap().qubit_weights(),
            vec![-2, 1]
        );
        let ones = FixedPointCodec::new(4, SignMode::OnesComplement).unwrap();
        assert_eq!(ones.qubit_weights(), vec![-7, 4, 2, 1]);
        assert_eq!(ones.range(), (-7, 7));
        assert!(FixedPointCodec::twos_complement(1).is_err());
    }

    #[test]
    fn decode_examples() {
        let codec = FixedPointCodec::twos_complement(4).unwrap();
        assert_eq!(codec.decode_integer(&bv("0011")).unwrap(), 3);
        assert_eq!(codec.decode_integer(&bv("1000")).unwrap(), -8);
        assert_eq!(codec.decode_integer(&bv("1111")).unwrap(), -1);
        assert!(matches!(
            codec.decode_integer(&bv("011")),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn to_real_examples() {
        assert_eq!(to_real(0, ScaleOffsetEntry::identity()), 0.0);
        assert_eq!(to_real(3, ScaleOffsetEntry::new(0.5, -1.0).unwrap()), 0.5);
        assert_eq!(to_real(15, ScaleOffsetEntry::new(1.0, -8.0).unwrap()), 7.0);
    }

    #[test]
    fn initial_scale_examples() {
        assert_eq!(initial_scale(7.0, -8.0, 4).unwrap(), 1.0);
        assert_eq!(initial_scale(1.0, 0.0, 1).unwrap(), 1.0);
        assert!((initial_scale(10.0, -10.0, 5).unwrap() - 20.0 / 31.0).abs() < 1e-15);
        assert!(matches!(
            initial_scale(1.0, 1.0, 4),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn unsigned_grid_spans_limits() {
        let grid = WeightGrid::unsigned(4).unwrap();
        assert_eq!(grid.qubit_weights(), vec![8, 4, 2, 1]);
        let (lo, hi) = grid.code_range();
        let entry = ScaleOffsetEntry::new(initial_scale(7.0, -8.0, 4).unwrap(), -8.0).unwrap();
        assert_eq!(to_real(lo, entry), -8.0);
        assert_eq!(to_real(hi, entry), 7.0);
        assert_eq!(grid.decode(&[1, 1, 0, 1]), 13);
    }

    #[test]
    fn twos_complement_is_bijective() {
        for bits in 2..=8u32 {
            let codec = FixedPointCodec::twos_complement(bits).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for code in 0..(1u64 << bits) {
                let v = codec
                    .decode_integer(&BitVector::from_code(code, bits as usize))
                    .unwrap();
                assert!(seen.insert(v));
            }
            let (lo, hi) = codec.range();
            assert_eq!(seen.len() as i64, hi - lo + 1);
            assert_eq!(*seen.first().unwrap(), lo);
            assert_eq!(*seen.last().unwrap(), hi);
        }
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(bits in 2u32..16, raw in any::<i64>(), ones in any::<bool>()) {
            let mode = if ones { SignMode::OnesComplement } else { SignMode::TwosComplement };
            let codec = FixedPointCodec::new(bits, mode).unwrap();
            let (lo, hi) = codec.range();
            let v = lo + raw.rem_euclid(hi - lo + 1);
            let encoded = codec.encode_integer(v).unwrap();
            prop_assert_eq!(codec.decode_integer(&encoded).unwrap(), v);
        }
    }
}
