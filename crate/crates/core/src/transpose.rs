//! Partial transposition and the passive spin flip.
//!
//! Every two-qubit Hermitian operator expands as
//! `M = 1/4 (s I + alpha.sigma (x) I + I (x) beta.sigma + R_kl sigma_k (x) sigma_l)`.
//! Flipping the second spin "passively", by negating `beta` and `R`, is the
//! partial transpose on the second qubit followed by a pi rotation of that
//! qubit, so the two maps share a spectrum. On entangled operators the
//! result is no longer positive.
//!
//! The transpose is taken in the computational basis. It negates `sigma_y`
//! (the only antisymmetric Pauli matrix) and leaves `sigma_x`, `sigma_z`
//! alone, i.e. it reflects the second Bloch vector through the x-z plane.
//! Another basis picks out another plane.

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::estimation::{fidelity_exact, Pairing, Prior, Scenario};
use crate::flip::antiunitary_flip;
use crate::hilbert::{
    hermitian_eigen, pauli, pauli_dot, pure_density, tensor, Mat2, Mat4, PauliAxis, Spinor,
    TwoQubitState, C64, HERMITIAN_TOL,
};
use crate::measurement::ProjectiveMeasurement;

/// Smaller Schmidt coefficient above which a basis vector counts as entangled.
pub const PRODUCT_TOL: f64 = 1e-8;

/// Eigenvalue tolerance for reading a transformed matrix back as a pure state.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    /// Coefficient of `I (x) I`, equal to the trace.
    pub scalar: f64,
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    /// `correlations[k][l]` multiplies `sigma_k (x) sigma_l`.
    pub correlations: [[f64; 3]; 3],
}

impl PauliDecomposition {
    pub fn reconstruct(&self) -> Mat4 {
        let id = Mat2::identity();
        let mut m = id.kron(&id).scale(C64::new(self.scalar, 0.0));
        m = m + pauli_dot(&self.alpha).kron(&id) + id.kron(&pauli_dot(&self.beta));
        for k in PauliAxis::ALL {
            for l in PauliAxis::ALL {
                let r = self.correlations[k.index()][l.index()];
                m = m + pauli(k).kron(&pauli(l)).scale(C64::new(r, 0.0));
            }
        }
        m.scale(C64::new(0.25, 0.0))
    }

    /// Negates `beta` and `R`.
    pub fn flipped(&self) -> Self {
        PauliDecomposition {
            beta: self.beta.map(|b| -b),
            correlations: self.correlations.map(|row| row.map(|r| -r)),
            ..*self
        }
    }
}

fn trace_with(m: &Mat4, p: &Mat4) -> f64 {
    (*m * *p).trace().re
}

/// Coefficients by trace inner products; `M` must be Hermitian.
pub fn pauli_decompose(m: &Mat4) -> Result<PauliDecomposition> {
    let residual = m.hermiticity_residual();
    if !(residual <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { residual });
    }
    let id = Mat2::identity();
    Ok(PauliDecomposition {
        scalar: m.trace().re,
        alpha: PauliAxis::ALL.map(|k| trace_with(m, &pauli(k).kron(&id))),
        beta: PauliAxis::ALL.map(|l| trace_with(m, &id.kron(&pauli(l)))),
        correlations: PauliAxis::ALL
            .map(|k| PauliAxis::ALL.map(|l| trace_with(m, &pauli(k).kron(&pauli(l))))),
    })
}

/// `(Tr_2 M) (x) I - M`, which negates every Pauli term acting on the second
/// qubit. An involution that keeps Hermiticity and trace.
pub fn passive_flip(m: &Mat4) -> Mat4 {
    let mut reduced = Mat2::zeros();
    for a in 0..2 {
        for c in 0..2 {
            reduced.0[a][c] = m.0[2 * a][2 * c] + m.0[2 * a + 1][2 * c + 1];
        }
    }
    reduced.kron(&Mat2::identity()) - *m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Transposes one tensor factor in the computational basis:
/// `(M^{T_2})_{ab,cd} = M_{ad,cb}` and `(M^{T_1})_{ab,cd} = M_{cb,ad}`.
pub fn partial_transpose(m: &Mat4, subsystem: Subsystem) -> Mat4 {
    let mut out = Mat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out.0[2 * a + b][2 * c + d] = match subsystem {
                        Subsystem::Second => m.0[2 * a + d][2 * c + b],
                        Subsystem::First => m.0[2 * c + b][2 * a + d],
                    };
                }
            }
        }
    }
    out
}

/// Minimum eigenvalue of the second-qubit partial transpose.
pub fn negativity(m: &Mat4) -> Result<f64> {
    Ok(hermitian_eigen(&partial_transpose(m, Subsystem::Second))?.values[0])
}

/// How far a Hermitian matrix is from being a projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorDefect {
    pub eigenvalues: [f64; 4],
    pub min_eigenvalue: f64,
    /// Frobenius norm of `M^2 - M`.
    pub idempotency: f64,
}

pub fn projector_defect(m: &Mat4) -> Result<ProjectorDefect> {
    let eig = hermitian_eigen(m)?;
    Ok(ProjectorDefect {
        eigenvalues: eig.values,
        min_eigenvalue: eig.values[0],
        idempotency: (*m * *m - *m).frobenius_norm(),
    })
}

/// Defects of the passively flipped projectors `|v_j><v_j|` of a measurement.
pub fn flipped_projector_defects(m: &ProjectiveMeasurement) -> [ProjectorDefect; 4] {
    m.basis().map(|v| {
        projector_defect(&passive_flip(pure_density(&v).matrix()))
            .expect("flip of a projector is Hermitian")
    })
}

/// The Pauli axis whose sign the computational-basis transpose flips.
pub fn transposed_axis() -> PauliAxis {
    PauliAxis::ALL
        .into_iter()
        .find(|&k| {
            pauli(k)
                .transpose()
                .max_abs_diff(&pauli(k).scale(C64::new(-1.0, 0.0)))
                == 0.0
        })
        .expect("sigma_y is antisymmetric")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCheck {
    /// Component negated by the transpose.
    pub matched: PauliAxis,
    /// Residual of `A (x) (b0 + b.sigma - 2 b_k sigma_k)` with `k = matched`.
    pub residual: f64,
    /// Same with `k = z` regardless of the basis.
    pub z_form_residual: f64,
}

fn reflected(b: &[f64; 3], axis: PauliAxis) -> [f64; 3] {
    let mut r = *b;
    r[axis.index()] = -r[axis.index()];
    r
}

fn single(a0: f64, a: &[f64; 3]) -> Mat2 {
    Mat2::identity().scale(C64::new(a0, 0.0)) + pauli_dot(a)
}

/// Compares the second-qubit transpose of `(a0 + a.sigma) (x) (b0 + b.sigma)`
/// with the same operator reflected in one component of `b`.
pub fn reflection_identity_check(a0: f64, a: &[f64; 3], b0: f64, b: &[f64; 3]) -> ReflectionCheck {
    let left = single(a0, a);
    let pt = partial_transpose(&left.kron(&single(b0, b)), Subsystem::Second);
    let residual_for = |axis| pt.max_abs_diff(&left.kron(&single(b0, &reflected(b, axis))));
    let matched = transposed_axis();
    ReflectionCheck {
        matched,
        residual: residual_for(matched),
        z_form_residual: residual_for(PauliAxis::Z),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorFlip {
    /// `(I (x) U) rho^{T_2} (I (x) U)^H` with `U` the pi rotation about the
    /// axis normal to the reflection plane.
    pub output: Mat4,
    pub eigenvalues: [f64; 4],
    /// False when a negative eigenvalue shows the output is not a state.
    pub physical: bool,
    /// The output read back as a pure state, when it is one.
    pub state: Option<TwoQubitState>,
}

/// `exp(-i pi sigma_k / 2) = -i sigma_k`.
pub fn pi_rotation(axis: PauliAxis) -> Mat2 {
    pauli(axis).scale(C64::new(0.0, -1.0))
}

/// Reflection of the second spin by partial transposition, then a pi
/// rotation of that spin. On product states this flips the second spin; on
/// entangled states it produces a non-positive matrix.
pub fn mirror_plus_rotation_flip(psi: &TwoQubitState) -> MirrorFlip {
    let rho = pure_density(psi);
    let u = Mat2::identity().kron(&pi_rotation(transposed_axis()));
    let output = partial_transpose(rho.matrix(), Subsystem::Second).conjugate_by(&u);
    let eig = hermitian_eigen(&output).expect("rotated partial transpose is Hermitian");
    let physical = eig.values[0] >= -STATE_TOL;
    let pure = physical && (eig.values[3] - 1.0).abs() <= STATE_TOL;
    let state = if pure {
        TwoQubitState::normalized(eig.vector(3)).ok()
    } else {
        None
    };
    MirrorFlip {
        output,
        eigenvalues: eig.values,
        physical,
        state,
    }
}

/// Schmidt coefficients, largest first: singular values of the amplitude
/// matrix.
pub fn schmidt_coefficients(psi: &TwoQubitState) -> [f64; 2] {
    let c = psi.coefficient_matrix();
    let total = c.frobenius_norm().powi(2);
    let det = (c.0[0][0] * c.0[1][1] - c.0[0][1] * c.0[1][0]).norm();
    let disc = (total * total - 4.0 * det * det).max(0.0).sqrt();
    let large = ((total + disc) / 2.0).sqrt();
    // det = s1 s2 keeps the small value accurate.
    let small = if large > 0.0 { det / large } else { 0.0 };
    [large, small]
}

/// Splits a product state into `a (x) b`.
pub fn factor_product(psi: &TwoQubitState) -> Result<(Spinor, Spinor)> {
    let schmidt = schmidt_coefficients(psi)[1];
    if schmidt > PRODUCT_TOL {
        return Err(Error::EntangledBasis { index: 0, schmidt });
    }
    let c = psi.coefficient_matrix();
    let row = if c.0[0][0].norm_sqr() + c.0[0][1].norm_sqr()
        >= c.0[1][0].norm_sqr() + c.0[1][1].norm_sqr()
    {
        0
    } else {
        1
    };
    let b = Spinor::normalized(c.0[row][0], c.0[row][1])?;
    // C = a b^T, so C conj(b) = a.
    let a0 = c.0[0][0] * b.a0().conj() + c.0[0][1] * b.a1().conj();
    let a1 = c.0[1][0] * b.a0().conj() + c.0[1][1] * b.a1().conj();
    Ok((Spinor::normalized(a0, a1)?, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassiveFlipEquivalence {
    /// Fidelity of the measurement on parallel pairs.
    pub parallel: f64,
    /// Fidelity on anti-parallel pairs after flipping each second factor.
    pub antiparallel_flipped: f64,
    pub flipped: ProjectiveMeasurement,
}

/// For a basis of product vectors `a_j (x) b_j`, replaces each `b_j` by its
/// anti-unitary flip and compares the two fidelities. Entangled bases are
/// rejected with the offending vector and its smaller Schmidt coefficient.
pub fn passive_flip_equivalence_product(
    m: &ProjectiveMeasurement,
    prior: &Prior,
) -> Result<PassiveFlipEquivalence> {
    let mut flipped = *m.basis();
    for (index, v) in flipped.iter_mut().enumerate() {
        let (a, b) = factor_product(v).map_err(|e| match e {
            Error::EntangledBasis { schmidt, .. } => Error::EntangledBasis { index, schmidt },
            other => other,
        })?;
        *v = tensor(&a, &antiunitary_flip(&b));
    }
    let flipped = ProjectiveMeasurement::new(
        flipped,
        *m.guesses(),
        alloc::format!("{}-flipped", m.label()),
    )?;
    let parallel = fidelity_exact(m, &Scenario::new(Pairing::Parallel, prior.clone())).value;
    let antiparallel_flipped = fidelity_exact(
        &flipped,
        &Scenario::new(Pairing::Antiparallel, prior.clone()),
    )
    .value;
    Ok(PassiveFlipEquivalence {
        parallel,
        antiparallel_flipped,
        flipped,
    })
}

/// Product basis `{u_i (x) w_k}` from the columns of two single-qubit unitaries.
pub fn product_basis(u: &Mat2, w: &Mat2) -> [TwoQubitState; 4] {
    core::array::from_fn(|j| {
        let a = u.column(j / 2);
        let b = w.column(j % 2);
        TwoQubitState::normalized([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
            .expect("columns of a unitary are unit vectors")
    })
}
