//! Counter-addressed randomness.
//!
//! Every stochastic routine draws from a [`TrialRng`] addressed by
//! `(seed, domain, index)`: a ChaCha8 stream keyed by `seed`, the stream id set
//! to `domain`, and the word position set to `index * WORDS_PER_TRIAL`. Trial
//! `i` therefore sees the same numbers no matter which worker runs it or in
//! which order, which is what makes sharded Monte-Carlo runs bit-identical to
//! sequential ones.

use core::f64::consts::PI;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::hilbert::Direction;

/// 32-bit words reserved per trial (512 `u64` draws).
pub const WORDS_PER_TRIAL: u128 = 1024;

/// Stream ids, one per consumer, so equal seeds do not correlate modules.
pub mod domain {
    pub const FIDELITY: u64 = 1;
    pub const OPTIMIZER: u64 = 2;
    pub const FLIP: u64 = 3;
    pub const SPAN: u64 = 4;
    pub const UNITARY_FLIP: u64 = 5;
    /// Random inputs of the verification report.
    pub const VERIFY: u64 = 6;
}

pub struct TrialRng {
    inner: ChaCha8Rng,
    drawn: u128,
    budget: u128,
}

impl TrialRng {
    pub fn new(seed: u64, domain: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(domain);
        inner.set_word_pos(index as u128 * WORDS_PER_TRIAL);
        TrialRng {
            inner,
            drawn: 0,
            budget: WORDS_PER_TRIAL,
        }
    }

    /// An unbounded stream for callers that do not address trials.
    pub fn stream(seed: u64, domain: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(domain);
        TrialRng {
            inner,
            drawn: 0,
            budget: u128::MAX,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.drawn += 2;
        debug_assert!(self.drawn <= self.budget, "trial exceeded its word budget");
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform on the sphere: `z ~ U(-1, 1)`, azimuth `~ U(0, 2 pi)`.
    pub fn direction(&mut self) -> Direction {
        let z = 2.0 * self.uniform() - 1.0;
        let phi = 2.0 * PI * self.uniform();
        let r = (1.0 - z * z).max(0.0).sqrt();
        Direction::from_vector([r * phi.cos(), r * phi.sin(), z])
            .expect("sphere sample has unit length")
    }
}
