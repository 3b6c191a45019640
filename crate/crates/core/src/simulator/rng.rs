//! Portable Gaussian noise.
//!
//! The generator is PCG32 (XSH-RR output, 64-bit LCG state) created with
//! `Pcg32::new(seed, NOISE_STREAM)`. A uniform double is built from two
//! consecutive 32-bit outputs `hi`, `lo` as
//! `((hi << 32 | lo) >> 11) * 2^-53`, and a standard normal from two
//! uniforms `u1`, `u2` by Box-Muller: `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`.
//! Every normal consumes exactly four 32-bit outputs.

use std::f64::consts::TAU;

use rand_core::Rng;
use rand_pcg::Pcg32;

pub const NOISE_STREAM: u64 = 0xda3e_39cb_94b9_5bdb;

#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: Pcg32,
}

impl NoiseSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Pcg32::new(seed, NOISE_STREAM),
        }
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        let hi = u64::from(self.rng.next_u32());
        let lo = u64::from(self.rng.next_u32());
        ((hi << 32 | lo) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (TAU * u2).cos()
    }

    pub fn normal(&mut self, std: f64) -> f64 {
        std * self.standard_normal()
    }
}
