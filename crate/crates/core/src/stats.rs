//! Block-structured accumulation of per-trial scores.
//!
//! Trials are grouped into fixed blocks of [`BLOCK`] consecutive indices. Each
//! block is summed in index order and block tallies are merged in block order.
//! Parallel drivers that respect this layout reproduce the sequential result
//! bit for bit.

use core::ops::Range;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Tally {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum / self.count as f64
    }

    /// Sample standard deviation divided by `sqrt(count)`; zero for a single
    /// trial.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Number of blocks covering `trials`.
pub fn block_count(trials: u64) -> u64 {
    trials.div_ceil(BLOCK)
}

/// Trial indices of block `block`.
pub fn block_range(block: u64, trials: u64) -> Range<u64> {
    let start = block * BLOCK;
    start..(start + BLOCK).min(trials)
}

pub fn tally_block(block: u64, trials: u64, mut score: impl FnMut(u64) -> f64) -> Tally {
    let mut t = Tally::default();
    for i in block_range(block, trials) {
        t.push(score(i));
    }
    t
}

/// Sequential driver with the canonical block layout.
pub fn tally_trials(trials: u64, mut score: impl FnMut(u64) -> f64) -> Tally {
    (0..block_count(trials))
        .map(|b| tally_block(b, trials, &mut score))
        .fold(Tally::default(), Tally::merge)
}
