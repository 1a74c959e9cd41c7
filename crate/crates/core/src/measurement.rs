//! The two reference measurements: the tetrahedral measurement on parallel
//! spins and the `alpha`/`beta` measurement on anti-parallel spins.
//!
//! Both are built from four tetrahedral product states whose phases have to
//! be chosen so that the resulting bases are orthonormal. The phases are
//! found numerically: the parallel states `|n_j, n_j>` are phased to have all
//! pairwise overlaps equal to `-1/3`, the anti-parallel states `|n_j, -n_j>`
//! to `+1/3`.

use alloc::string::String;
use core::f64::consts::PI;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{bloch_to_spinor, tensor, Direction, Ket, Matrix, TwoQubitState, C64};

/// Residual below which a basis counts as orthonormal and complete.
pub const VALIDATION_TOL: f64 = 1e-8;
/// Required accuracy of the phase search.
pub const PHASE_TOL: f64 = 1e-10;

const PHASE_GRID: usize = 64;
const PHASE_STEP_TOL: f64 = 1e-12;
const PHASE_MAX_SWEEPS: usize = 10_000;

/// The four tetrahedron vertices used as guesses by both measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrahedron {
    pub vertices: [Direction; 4],
}

pub fn tetrahedron() -> Tetrahedron {
    let r8 = 8.0f64.sqrt() / 3.0;
    let r2 = 2.0f64.sqrt() / 3.0;
    let r23 = (2.0f64 / 3.0).sqrt();
    let third = 1.0 / 3.0;
    let v = |x, y, z| Direction::from_vector([x, y, z]).expect("tetrahedron vertex");
    Tetrahedron {
        vertices: [
            v(0.0, 0.0, 1.0),
            v(r8, 0.0, -third),
            v(-r2, r23, -third),
            v(-r2, -r23, -third),
        ],
    }
}

/// Four orthonormal two-qubit vectors, each tied to a guessed direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    basis: [TwoQubitState; 4],
    guesses: [Direction; 4],
    label: String,
}

impl ProjectiveMeasurement {
    /// Fails with [`Error::InvalidMeasurement`] unless [`validate_basis`] passes.
    pub fn new(
        basis: [TwoQubitState; 4],
        guesses: [Direction; 4],
        label: impl Into<String>,
    ) -> Result<Self> {
        let report = validate_basis(&basis);
        if !report.passes {
            return Err(Error::InvalidMeasurement {
                orthonormality: report.orthonormality,
                completeness: report.completeness,
            });
        }
        Ok(ProjectiveMeasurement {
            basis,
            guesses,
            label: label.into(),
        })
    }

    pub fn basis(&self) -> &[TwoQubitState; 4] {
        &self.basis
    }

    pub fn guesses(&self) -> &[Direction; 4] {
        &self.guesses
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_guesses(&self, guesses: [Direction; 4]) -> Self {
        ProjectiveMeasurement {
            basis: self.basis,
            guesses,
            label: self.label.clone(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn validate(&self) -> ValidationReport {
        validate_basis(&self.basis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `max_jk |<b_j|b_k> - delta_jk|`.
    pub orthonormality: f64,
    /// `max |sum_j |b_j><b_j| - I|` entrywise.
    pub completeness: f64,
    pub passes: bool,
}

pub fn validate_basis(basis: &[TwoQubitState; 4]) -> ValidationReport {
    let gram = gram_matrix(basis);
    let orthonormality = gram.max_abs_diff(&Matrix::identity());
    let resolution = basis
        .iter()
        .fold(Matrix::<4>::zeros(), |acc, b| acc + *b.density().matrix());
    let completeness = resolution.max_abs_diff(&Matrix::identity());
    ValidationReport {
        orthonormality,
        completeness,
        passes: orthonormality < VALIDATION_TOL && completeness < VALIDATION_TOL,
    }
}

/// `G[j][k] = <s_j|s_k>`.
pub fn gram_matrix(states: &[TwoQubitState; 4]) -> Matrix<4> {
    Matrix(core::array::from_fn(|j| {
        core::array::from_fn(|k| states[j].inner(&states[k]))
    }))
}

/// Phases `chi_j` (with `chi_1 = 0`) such that the states
/// `e^{i chi_j} s_j` have all pairwise overlaps equal to the real `target`.
///
/// Coarse grid over `(chi_2, chi_3, chi_4)` followed by exact coordinate
/// minimization of `sum_{j<k} |overlap_jk - target|^2`.
pub fn fix_state_phases(states: &[TwoQubitState; 4], target: f64) -> Result<[f64; 4]> {
    let gram = gram_matrix(states);
    let objective = |chi: &[f64; 4]| -> f64 {
        let mut s = 0.0;
        for j in 0..4 {
            for k in (j + 1)..4 {
                let ov = C64::from_polar(1.0, chi[k] - chi[j]) * gram.0[j][k];
                s += (ov - target).norm_sqr();
            }
        }
        s
    };

    let mut best = [0.0; 4];
    let mut best_value = f64::INFINITY;
    let step = 2.0 * PI / PHASE_GRID as f64;
    for a in 0..PHASE_GRID {
        for b in 0..PHASE_GRID {
            for c in 0..PHASE_GRID {
                let chi = [0.0, a as f64 * step, b as f64 * step, c as f64 * step];
                let v = objective(&chi);
                if v < best_value {
                    best_value = v;
                    best = chi;
                }
            }
        }
    }

    // Along chi_m the objective is const - 2 target Re(e^{i chi_m} z_m).
    let mut chi = best;
    for _ in 0..PHASE_MAX_SWEEPS {
        let mut largest_step = 0.0f64;
        for m in 1..4 {
            let mut z = C64::new(0.0, 0.0);
            for j in 0..m {
                z += C64::from_polar(1.0, -chi[j]) * gram.0[j][m];
            }
            for k in (m + 1)..4 {
                z += (C64::from_polar(1.0, chi[k]) * gram.0[m][k]).conj();
            }
            if z.norm() == 0.0 {
                continue;
            }
            let updated = if target >= 0.0 {
                -z.arg()
            } else {
                PI - z.arg()
            };
            let updated = wrap_phase(updated);
            largest_step = largest_step.max(wrap_phase(updated - chi[m]).abs());
            chi[m] = updated;
        }
        if largest_step < PHASE_STEP_TOL {
            break;
        }
    }

    let residual = max_overlap_residual(&gram, &chi, target);
    if !(residual < PHASE_TOL) {
        return Err(Error::PhaseSearch { residual });
    }
    Ok(chi)
}

fn max_overlap_residual(gram: &Matrix<4>, chi: &[f64; 4], target: f64) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..4 {
        for k in (j + 1)..4 {
            let ov = C64::from_polar(1.0, chi[k] - chi[j]) * gram.0[j][k];
            worst = worst.max((ov - target).norm());
        }
    }
    worst
}

/// Wraps into `(-pi, pi]`.
fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// `|n_j, n_j>` with both spinors carrying phase `chi_j`.
pub fn parallel_states(phases: &[f64; 4]) -> [TwoQubitState; 4] {
    let t = tetrahedron();
    core::array::from_fn(|j| {
        let s = bloch_to_spinor(&t.vertices[j], phases[j]);
        tensor(&s, &s)
    })
}

/// `|n_j, -n_j>` with the first spinor carrying phase `chi_j`.
pub fn antiparallel_states(phases: &[f64; 4]) -> [TwoQubitState; 4] {
    let t = tetrahedron();
    core::array::from_fn(|j| {
        let n = t.vertices[j];
        tensor(&bloch_to_spinor(&n, phases[j]), &bloch_to_spinor(&-n, 0.0))
    })
}

/// Spinor phases making `<n_j,n_j|n_k,n_k> = -1/3` for all `j != k`.
pub fn fix_phases_parallel() -> Result<[f64; 4]> {
    // Each state carries twice its spinor phase.
    let state_phases = fix_state_phases(&parallel_states(&[0.0; 4]), -1.0 / 3.0)?;
    Ok(state_phases.map(|p| 0.5 * p))
}

/// First-spinor phases making `<n_j,-n_j|n_k,-n_k> = +1/3` for all `j != k`.
pub fn fix_phases_antiparallel() -> Result<[f64; 4]> {
    fix_state_phases(&antiparallel_states(&[0.0; 4]), 1.0 / 3.0)
}

/// Basis `sqrt(3)/2 |n_j, n_j> + 1/2 |psi^->`, guessing `n_j` on outcome `j`.
pub fn build_parallel_optimal() -> Result<ProjectiveMeasurement> {
    build_parallel_with_phases(&fix_phases_parallel()?)
}

pub fn build_parallel_with_phases(phases: &[f64; 4]) -> Result<ProjectiveMeasurement> {
    let singlet = crate::hilbert::singlet().amplitudes();
    let half_sqrt3 = 0.5 * 3.0f64.sqrt();
    let raw = parallel_states(phases).map(|s| {
        let a = s.amplitudes();
        core::array::from_fn(|i| a[i] * half_sqrt3 + singlet[i] * 0.5)
    });
    finish_basis(raw, "parallel-optimal")
}

/// `alpha = 13 / (6 sqrt 6 - 2 sqrt 2)`.
pub fn default_alpha() -> f64 {
    13.0 / (6.0 * 6.0f64.sqrt() - 2.0 * 2.0f64.sqrt())
}

/// `beta = (5 - 2 sqrt 3) / (6 sqrt 6 - 2 sqrt 2)`.
pub fn default_beta() -> f64 {
    (5.0 - 2.0 * 3.0f64.sqrt()) / (6.0 * 6.0f64.sqrt() - 2.0 * 2.0f64.sqrt())
}

/// Basis `alpha |n_j,-n_j> - beta sum_{k != j} |n_k,-n_k>`, guessing `n_j`.
///
/// Arbitrary `alpha`, `beta` are accepted; unless they satisfy the
/// orthonormality conditions the construction fails with
/// [`Error::NotOrthonormal`] carrying the Gram matrix.
pub fn build_antiparallel(alpha: f64, beta: f64) -> Result<ProjectiveMeasurement> {
    build_antiparallel_with_phases(alpha, beta, &fix_phases_antiparallel()?)
}

pub fn build_antiparallel_with_phases(
    alpha: f64,
    beta: f64,
    phases: &[f64; 4],
) -> Result<ProjectiveMeasurement> {
    let states = antiparallel_states(phases).map(|s| s.amplitudes());
    let raw = core::array::from_fn(|j| {
        core::array::from_fn(|i| {
            let others: C64 = (0..4).filter(|&k| k != j).map(|k| states[k][i]).sum();
            states[j][i] * alpha - others * beta
        })
    });
    finish_basis(raw, "antiparallel")
}

fn finish_basis(raw: [[C64; 4]; 4], label: &str) -> Result<ProjectiveMeasurement> {
    let gram = Matrix::<4>(core::array::from_fn(|j| {
        core::array::from_fn(|k| crate::hilbert::inner(&raw[j], &raw[k]))
    }));
    let residual = gram.max_abs_diff(&Matrix::identity());
    if !(residual < VALIDATION_TOL) {
        return Err(Error::NotOrthonormal {
            residual,
            gram: alloc::boxed::Box::new(gram),
        });
    }
    let basis = raw.map(|a| TwoQubitState::normalized(a).expect("non-zero basis vector"));
    ProjectiveMeasurement::new(basis, tetrahedron().vertices, label)
}

/// Solves the norm and orthogonality conditions for
/// `alpha s_j - beta sum_{k != j} s_k` given states with equal real pairwise
/// overlap `g` (read off the Gram matrix as the mean off-diagonal real part).
/// Returns the root with the smaller `beta`.
pub fn antiparallel_coefficients_from_gram(gram: &Matrix<4>) -> (f64, f64) {
    let mut g = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            if j != k {
                g += gram.0[j][k].re;
            }
        }
    }
    let g = g / 12.0;
    // Norm minus orthogonality gives (1 - g)(alpha + beta)^2 = 1.
    let sum = 1.0 / (1.0 - g).sqrt();
    // Orthogonality: (4 + 12g) beta^2 - 2 s (1 + 3g) beta + g s^2 = 0.
    let a = 4.0 + 12.0 * g;
    let b = -2.0 * sum * (1.0 + 3.0 * g);
    let c = g * sum * sum;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let beta = (-b - disc) / (2.0 * a);
    (sum - beta, beta)
}
