//! Direction encoding with pairs of spin-1/2 particles.
//!
//! A direction `n` can be sent as two parallel spins `|n, n>` or as two
//! anti-parallel spins `|n, -n>`. This crate evaluates how well each encoding
//! can be decoded: exact average fidelities for fixed measurements, numerical
//! search over all two-qubit projective measurements, the universal spin-flip
//! (NOT) machine, and the partial-transpose view of passive spin flips.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! drivers and the command line live in the `dirq` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimation;
pub mod flip;
pub mod hilbert;
pub mod measurement;
pub mod optimizer;
pub mod rng;
pub mod statespace;
pub mod stats;
pub mod transpose;

pub use error::{Error, Result};
pub use hilbert::{Direction, Matrix, Spinor, TwoQubitState, C64};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
