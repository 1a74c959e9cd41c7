use alloc::boxed::Box;

use crate::hilbert::Matrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("vector is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("matrix is not Hermitian (max |M - M^H| = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("trace {trace} is not 1")]
    NotUnitTrace { trace: f64 },
    #[error("matrix has a negative eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Bloch vector has length {length} > 1")]
    BlochOutOfBall { length: f64 },
    #[error("phase search ended with residual {residual:e}")]
    PhaseSearch { residual: f64 },
    #[error("constructed basis is not orthonormal (residual {residual:e}); Gram matrix {gram:?}")]
    NotOrthonormal { residual: f64, gram: Box<Matrix<4>> },
    #[error(
        "invalid measurement: orthonormality residual {orthonormality:e}, \
         completeness residual {completeness:e}"
    )]
    InvalidMeasurement {
        orthonormality: f64,
        completeness: f64,
    },
    #[error("prior is invalid: {reason}")]
    InvalidPrior { reason: &'static str },
    #[error("basis vector {index} is entangled (smaller Schmidt coefficient {schmidt:e})")]
    EntangledBasis { index: usize, schmidt: f64 },
    #[error("{what} must be at least {min}")]
    TooFew { what: &'static str, min: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
