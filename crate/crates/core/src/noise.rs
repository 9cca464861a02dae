//! Counter-based deterministic noise source.
//!
//! Every random draw in the engine flows through [`NoiseStream`]: a pure
//! function of `(seed, run, step, slot)` with no mutable state, so parallel
//! runs and re-runs are bit-reproducible. Standard-normal values come from
//! Box-Muller over two hashed uniforms.

use crate::scalar::Scalar;
use crate::state::StateVec;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter-based random stream keyed by a 64-bit seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseStream {
    seed: u64,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive an independent stream for a distinct purpose (parameter init,
    /// batch selection, transfer noise, ...). Tags are compile-time constants
    /// at the call sites.
    pub fn substream(&self, tag: u64) -> Self {
        Self {
            seed: splitmix(self.seed ^ splitmix(tag)),
        }
    }

    #[inline]
    fn word(&self, run: u64, step: u64, slot: u64) -> u64 {
        let mut z = splitmix(self.seed ^ run.wrapping_mul(0xA076_1D64_78BD_642F));
        z = splitmix(z ^ step.wrapping_mul(0xE703_7ED1_A0B4_28DB));
        splitmix(z ^ slot.wrapping_mul(0x8EBC_6AF0_9C88_C6E3))
    }

    /// Uniform draw in the open interval (0, 1) for logical slot `slot`.
    #[inline]
    fn uniform_f64(&self, run: u64, step: u64, slot: u64) -> f64 {
        // 53 mantissa bits, offset by half a lattice cell to exclude 0 and 1.
        ((self.word(run, step, slot) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform value in (0, 1). Each logical slot owns two raw words so that
    /// uniform and normal draws at the same slot never overlap.
    pub fn uniform<T: Scalar>(&self, run: u64, step: u64, slot: u64) -> T {
        T::lit(self.uniform_f64(run, step, 2 * slot))
    }

    /// Standard-normal value via Box-Muller at logical slot `slot`.
    pub fn normal<T: Scalar>(&self, run: u64, step: u64, slot: u64) -> T {
        let u1 = self.uniform_f64(run, step, 2 * slot);
        let u2 = self.uniform_f64(run, step, 2 * slot + 1);
        T::lit((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
    }

    /// A standard-normal state vector of dimension `dim`.
    pub fn normal_state<T: Scalar>(&self, run: u64, step: u64, dim: usize) -> StateVec<T> {
        StateVec::new((0..dim).map(|i| self.normal(run, step, i as u64)).collect())
    }

    /// Uniform integer in `[0, bound)`.
    pub fn index(&self, run: u64, step: u64, slot: u64, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.word(run, step, 2 * slot) % bound as u64) as usize
    }
}
