//! The single random stream used by every stochastic component.
//!
//! Draws are derived from raw 64-bit outputs here rather than through a
//! distribution library so that a given seed produces the same run on any
//! build that pins the generator crate.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

/// Identifier written into run metadata.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.10/seed_from_u64";

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        SimRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, n)` by widening multiply. `n` must be non-zero.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
