//! Dimension of the space spanned by the pair states.
//!
//! Parallel pairs `|n, n>` are symmetric and stay in the three-dimensional
//! triplet space; anti-parallel pairs `|n, -n>` have a singlet component
//! and span all four dimensions.

use alloc::vec::Vec;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::estimation::{source_state, Pairing};
use crate::hilbert::{
    bloch_to_spinor, jacobi_rotation, singlet, tensor, Direction, Ket, TwoQubitState, C64,
};
use crate::rng::{domain, TrialRng};

/// Singular values below this fraction of the largest do not count.
pub const RANK_TOL: f64 = 1e-8;

const SVD_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub samples: usize,
    /// Singular values of the stacked state matrix, descending.
    pub singular_values: [f64; 4],
    pub rank: usize,
}

/// Span of `samples` source states with directions drawn uniformly.
pub fn span_rank(pairing: Pairing, samples: usize, seed: u64) -> Result<GramReport> {
    if samples < 4 {
        return Err(Error::TooFew {
            what: "span sample count",
            min: 4,
        });
    }
    Ok(span_rank_of(&sample_states(pairing, samples, seed)))
}

pub fn sample_states(pairing: Pairing, samples: usize, seed: u64) -> Vec<TwoQubitState> {
    (0..samples as u64)
        .map(|i| source_state(&TrialRng::new(seed, domain::SPAN, i).direction(), pairing))
        .collect()
}

/// Rank of an arbitrary family of states.
pub fn span_rank_of(states: &[TwoQubitState]) -> GramReport {
    let singular_values = singular_values(states);
    let cutoff = RANK_TOL * singular_values[0];
    let rank = singular_values
        .iter()
        .filter(|&&s| s > cutoff && s > 0.0)
        .count();
    GramReport {
        samples: states.len(),
        singular_values,
        rank,
    }
}

/// One-sided Jacobi on the columns of the `len x 4` matrix whose rows are the
/// states. Small singular values come out with absolute error near machine
/// precision, unlike square roots of Gram eigenvalues.
pub fn singular_values(states: &[TwoQubitState]) -> [f64; 4] {
    let mut cols: [Vec<C64>; 4] =
        core::array::from_fn(|k| states.iter().map(|s| s.amplitudes()[k]).collect());
    let norm_sq = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..4 {
            for q in (p + 1)..4 {
                let app = norm_sq(&cols[p]);
                let aqq = norm_sq(&cols[q]);
                let apq: C64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                if apq.norm() <= f64::EPSILON * (app * aqq).sqrt()
                    || apq.norm() <= f64::MIN_POSITIVE
                {
                    continue;
                }
                rotated = true;
                let (cs, sn) = jacobi_rotation(app, apq, aqq);
                for k in 0..states.len() {
                    let (xp, xq) = (cols[p][k], cols[q][k]);
                    cols[p][k] = xp * cs - xq * sn.conj();
                    cols[q][k] = xp * sn + xq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values = cols.map(|c| norm_sq(&c).sqrt());
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// `|<singlet|psi>|`, the weight outside the symmetric subspace.
pub fn symmetric_subspace_residual(psi: &TwoQubitState) -> f64 {
    singlet().inner(psi).norm()
}

/// `(|<n,n|m,m>|^2, |<n,-n|m,-m>|^2)`. Both equal `((1 + n.m)/2)^2`.
pub fn pair_overlaps(n: &Direction, m: &Direction) -> (f64, f64) {
    let pair =
        |a: &Direction, b: &Direction| tensor(&bloch_to_spinor(a, 0.0), &bloch_to_spinor(b, 0.0));
    let parallel = pair(n, n).inner(&pair(m, m)).norm_sqr();
    let antiparallel = pair(n, &-*n).inner(&pair(m, &-*m)).norm_sqr();
    (parallel, antiparallel)
}
