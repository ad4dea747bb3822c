//! Seeded random streams.
//!
//! Every stochastic routine in the crate draws from ChaCha20 (RFC 8439 block
//! function, 20 rounds) seeded through `SeedableRng::seed_from_u64`. Uniform
//! doubles are formed from the top 53 bits of each 64-bit output, so a given
//! seed yields the same stream on every platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Deterministic 64-bit random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha20Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `(-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }
}
