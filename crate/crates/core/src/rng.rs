//! Seeded PCG32 stream shared by every randomized routine in the crate.
//!
//! Seeds are expanded with splitmix64 and fed to a PCG32 (XSH-RR, 64-bit
//! state) on the reference default stream. All derived draws (uniform
//! doubles, bounded integers, Gaussians) are defined here so results are
//! reproducible bit-for-bit across platforms.

use rand_core::Rng;
use rand_pcg::Pcg32;

/// Reference PCG default stream (`1442695040888963407 >> 1`).
const DEFAULT_STREAM: u64 = 0x0a02_bdbf_7bb3_c0a7;

/// One step of splitmix64 applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for the `index`-th independent stream under `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Pcg32,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Pcg32::new(splitmix64(seed), DEFAULT_STREAM),
        }
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    /// Two 32-bit draws, first draw in the high word.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform double in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` by rejection on 32-bit draws.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u32();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    #[inline]
    pub fn next_bit(&mut self) -> u8 {
        (self.next_u32() >> 31) as u8
    }

    /// Standard normal via the Box-Muller cosine branch (one pair of
    /// uniforms per draw).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
