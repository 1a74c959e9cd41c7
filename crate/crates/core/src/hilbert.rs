//! Complex linear algebra for one and two spin-1/2 systems.
//!
//! Everything here works on fixed-size arrays: spinors have two amplitudes,
//! two-qubit states four, and matrices are `N x N` with `N` in `{2, 4}`.
//! Two-qubit amplitudes are ordered `|00>, |01>, |10>, |11>`, i.e. the first
//! qubit is the most significant bit.

use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `|v|^2 - 1` for directions and pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise tolerance used when a matrix must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Lowest eigenvalue still accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A unit vector on the 2-sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    pub const PLUS_Z: Direction = Direction {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sq = x * x + y * y + z * z;
        if !((norm_sq - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Direction { x, y, z })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Direction {
            x: v[0] / norm,
            y: v[1] / norm,
            z: v[2] / norm,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn dot_vector(&self, v: &[f64; 3]) -> f64 {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Amplitudes of a normalized pure state.
pub trait Ket<const N: usize> {
    fn amplitudes(&self) -> [C64; N];
}

/// Pure state of a single spin-1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor([C64; 2]);

impl Spinor {
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm_sq = a0.norm_sqr() + a1.norm_sqr();
        if !((norm_sq - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Spinor([a0, a1]))
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(a0: C64, a1: C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Spinor([a0 / norm, a1 / norm]))
    }

    pub fn a0(&self) -> C64 {
        self.0[0]
    }

    pub fn a1(&self) -> C64 {
        self.0[1]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Spinor) -> C64 {
        inner(&self.0, &other.0)
    }

    pub fn density(&self) -> DensityMatrix<2> {
        pure_density(self)
    }
}

impl Ket<2> for Spinor {
    fn amplitudes(&self) -> [C64; 2] {
        self.0
    }
}

/// Pure state of two spin-1/2 particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState([C64; 4]);

impl TwoQubitState {
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let norm_sq = norm_sqr(&amplitudes);
        if !((norm_sq - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(TwoQubitState(amplitudes))
    }

    pub fn normalized(amplitudes: [C64; 4]) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(TwoQubitState(amplitudes.map(|a| a / norm)))
    }

    /// Multiplies by the global phase `e^{i phase}`.
    pub fn with_phase(&self, phase: f64) -> TwoQubitState {
        let p = C64::from_polar(1.0, phase);
        TwoQubitState(self.0.map(|a| a * p))
    }

    pub fn inner(&self, other: &TwoQubitState) -> C64 {
        inner(&self.0, &other.0)
    }

    pub fn density(&self) -> DensityMatrix<4> {
        pure_density(self)
    }

    /// The amplitudes as the 2x2 matrix `c[i][j]` with `i` the first qubit.
    pub fn coefficient_matrix(&self) -> Matrix<2> {
        Matrix([[self.0[0], self.0[1]], [self.0[2], self.0[3]]])
    }
}

impl Ket<4> for TwoQubitState {
    fn amplitudes(&self) -> [C64; 4] {
        self.0
    }
}

pub fn inner<const N: usize>(a: &[C64; N], b: &[C64; N]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr<const N: usize>(a: &[C64; N]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `e^{i phase} (cos(theta/2), e^{i phi} sin(theta/2))`, with the south pole
/// mapped to `e^{i phase} (0, 1)`.
pub fn bloch_to_spinor(n: &Direction, phase: f64) -> Spinor {
    let global = C64::from_polar(1.0, phase);
    let cos_half = ((1.0 + n.z) / 2.0).max(0.0).sqrt();
    let sin_half = ((1.0 - n.z) / 2.0).max(0.0).sqrt();
    let rho = (n.x * n.x + n.y * n.y).sqrt();
    let azimuth = if rho > 0.0 {
        C64::new(n.x / rho, n.y / rho)
    } else {
        ONE
    };
    let (a0, a1) = if n.z == -1.0 || (rho == 0.0 && n.z < 0.0) {
        (ZERO, ONE)
    } else {
        (c(cos_half), azimuth * sin_half)
    };
    let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    Spinor([global * a0 / norm, global * a1 / norm])
}

/// Bloch vector `n_k = <s|sigma_k|s>` of a spinor, normalized by `<s|s>`.
pub fn spinor_to_bloch(s: &Spinor) -> Result<Direction> {
    let [a0, a1] = s.0;
    let norm_sq = a0.norm_sqr() + a1.norm_sqr();
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroVector);
    }
    let cross = a0.conj() * a1;
    Direction::from_vector([
        2.0 * cross.re / norm_sq,
        2.0 * cross.im / norm_sq,
        (a0.norm_sqr() - a1.norm_sqr()) / norm_sq,
    ])
}

/// `|a> (x) |b>`.
pub fn tensor(a: &Spinor, b: &Spinor) -> TwoQubitState {
    let [a0, a1] = a.0;
    let [b0, b1] = b.0;
    TwoQubitState([a0 * b0, a0 * b1, a1 * b0, a1 * b1])
}

/// The singlet `(|01> - |10>)/sqrt(2)`.
pub fn singlet() -> TwoQubitState {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    TwoQubitState([ZERO, c(h), c(-h), ZERO])
}

/// Dense `N x N` complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Matrix<2>;
pub type Mat4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = ONE;
        }
        m
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64; N], b: &[C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn from_columns(columns: &[[C64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in columns.iter().enumerate() {
            for i in 0..N {
                m.0[i][j] = col[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> [C64; N] {
        core::array::from_fn(|i| self.0[i][j])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Matrix(self.0.map(|row| row.map(|x| x.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Matrix(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|k| self.0[k][k]).sum()
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        core::array::from_fn(|i| (0..N).map(|j| self.0[i][j] * v[j]).sum())
    }

    /// `<a|M|b>`.
    pub fn sandwich(&self, a: &[C64; N], b: &[C64; N]) -> C64 {
        inner(a, &self.mul_vec(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `U M U^H`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }
}

impl Matrix<2> {
    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Matrix<2>) -> Matrix<4> {
        let mut m = Matrix::<4>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[i][j] * other.0[k][l];
                    }
                }
            }
        }
        m
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Matrix<N>;

    fn mul(self, rhs: Matrix<N>) -> Matrix<N> {
        let mut m = Matrix::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Matrix<N>;

    fn add(self, rhs: Matrix<N>) -> Matrix<N> {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Matrix<N>;

    fn sub(self, rhs: Matrix<N>) -> Matrix<N> {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        }
    }
}

pub fn pauli(axis: PauliAxis) -> Mat2 {
    match axis {
        PauliAxis::X => Matrix([[ZERO, ONE], [ONE, ZERO]]),
        PauliAxis::Y => Matrix([[ZERO, -I], [I, ZERO]]),
        PauliAxis::Z => Matrix([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// `v . sigma` for a real 3-vector.
pub fn pauli_dot(v: &[f64; 3]) -> Mat2 {
    PauliAxis::ALL.iter().fold(Mat2::zeros(), |acc, &a| {
        acc + pauli(a).scale(c(v[a.index()]))
    })
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<const N: usize>(Matrix<N>);

impl<const N: usize> DensityMatrix<N> {
    pub fn new(m: Matrix<N>) -> Result<Self> {
        let residual = m.hermiticity_residual();
        if !(residual <= NORM_TOL) {
            return Err(Error::NotHermitian { residual });
        }
        let trace = m.trace().re;
        if !((trace - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotUnitTrace { trace });
        }
        let eig = hermitian_eigen(&m)?;
        if eig.values[0] < -POSITIVITY_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.values[0],
            });
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix::<N>::identity().scale(c(1.0 / N as f64)))
    }

    pub fn matrix(&self) -> &Matrix<N> {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &impl Ket<N>) -> f64 {
        let a = psi.amplitudes();
        self.0.sandwich(&a, &a).re
    }
}

impl DensityMatrix<2> {
    /// `(I + r . sigma)/2`; requires `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let length = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if length > 1.0 + NORM_TOL {
            return Err(Error::BlochOutOfBall { length });
        }
        Ok(DensityMatrix(
            (Mat2::identity() + pauli_dot(&r)).scale(c(0.5)),
        ))
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        PauliAxis::ALL.map(|a| (self.0 * pauli(a)).trace().re)
    }
}

/// `|psi><psi|`.
pub fn pure_density<const N: usize>(psi: &impl Ket<N>) -> DensityMatrix<N> {
    let a = psi.amplitudes();
    DensityMatrix(Matrix::outer(&a, &a))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianEigen<const N: usize> {
    /// Ascending.
    pub values: [f64; N],
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: Matrix<N>,
}

impl<const N: usize> HermitianEigen<N> {
    pub fn vector(&self, k: usize) -> [C64; N] {
        self.vectors.column(k)
    }

    pub fn reconstruct(&self) -> Matrix<N> {
        let mut m = Matrix::zeros();
        for k in 0..N {
            let v = self.vector(k);
            m = m + Matrix::outer(&v, &v).scale(c(self.values[k]));
        }
        m
    }
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// matrix. Closed form for `N = 2`, cyclic Jacobi otherwise.
pub fn hermitian_eigen<const N: usize>(m: &Matrix<N>) -> Result<HermitianEigen<N>> {
    let residual = m.hermiticity_residual();
    if !(residual <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { residual });
    }
    // Symmetrize so rounding-level asymmetry does not leak into the result.
    let mut a = (*m + m.adjoint()).scale(c(0.5));
    let mut v = Matrix::<N>::identity();
    if N == 2 {
        let (values, vecs) = eigen_2x2(a.0[0][0].re, a.0[0][1], a.0[1][1].re);
        let mut out = HermitianEigen {
            values: [0.0; N],
            vectors: Matrix::zeros(),
        };
        for k in 0..2 {
            out.values[k] = values[k];
            for i in 0..2 {
                out.vectors.0[i][k] = vecs[k][i];
            }
        }
        return Ok(out);
    }

    let scale = a.frobenius_norm().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (cs, sn) = jacobi_rotation(a.0[p][p].re, apq, a.0[q][q].re);
                rotate(&mut a, &mut v, p, q, cs, sn);
            }
        }
    }

    let mut order: [usize; N] = core::array::from_fn(|k| k);
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let mut out = HermitianEigen {
        values: [0.0; N],
        vectors: Matrix::zeros(),
    };
    for (k, &src) in order.iter().enumerate() {
        out.values[k] = a.0[src][src].re;
        for i in 0..N {
            out.vectors.0[i][k] = v.0[i][src];
        }
    }
    Ok(out)
}

fn off_diagonal_norm<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotation `U = [[c, s], [-conj(s), c]]` (acting on columns p, q) that
/// annihilates the off-diagonal entry of `[[app, apq], [conj(apq), aqq]]`.
pub(crate) fn jacobi_rotation(app: f64, apq: C64, aqq: f64) -> (f64, C64) {
    let mag = apq.norm();
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    (cs, phase * (t * cs))
}

/// `A <- U^H A U`, `V <- V U` for the plane rotation on (p, q).
fn rotate<const N: usize>(
    a: &mut Matrix<N>,
    v: &mut Matrix<N>,
    p: usize,
    q: usize,
    cs: f64,
    sn: C64,
) {
    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * cs - akq * sn.conj();
        a.0[k][q] = akp * sn + akq * cs;
    }
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = apk * cs - aqk * sn;
        a.0[q][k] = apk * sn.conj() + aqk * cs;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p] = c(a.0[p][p].re);
    a.0[q][q] = c(a.0[q][q].re);
    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * cs - vkq * sn.conj();
        v.0[k][q] = vkp * sn + vkq * cs;
    }
}

/// Eigenpairs of `[[a, b], [conj(b), d]]`, ascending.
fn eigen_2x2(a: f64, b: C64, d: f64) -> ([f64; 2], [[C64; 2]; 2]) {
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let r = (half_gap * half_gap + b.norm_sqr()).sqrt();
    let values = [mean - r, mean + r];
    if r == 0.0 {
        return (values, [[ONE, ZERO], [ZERO, ONE]]);
    }
    // Eigenvector of the upper eigenvalue, built from the better-conditioned row.
    let upper = if a >= d {
        [c(half_gap + r), b.conj()]
    } else {
        [b, c(-half_gap + r)]
    };
    let norm = (upper[0].norm_sqr() + upper[1].norm_sqr()).sqrt();
    let upper = [upper[0] / norm, upper[1] / norm];
    let lower = [-upper[1].conj(), upper[0].conj()];
    (values, [lower, upper])
}

/// `exp(i H)` for Hermitian `H`, via its eigendecomposition.
pub fn expm_i_hermitian<const N: usize>(h: &Matrix<N>) -> Result<Matrix<N>> {
    let eig = hermitian_eigen(h)?;
    let mut u = Matrix::zeros();
    for k in 0..N {
        let v = eig.vector(k);
        u = u + Matrix::outer(&v, &v).scale(C64::from_polar(1.0, eig.values[k]));
    }
    Ok(u)
}

/// Builds a Hermitian matrix from `N^2` reals: the diagonal first, then the
/// real and imaginary parts of each upper off-diagonal entry row by row.
pub fn hermitian_from_params<const N: usize>(params: &[f64]) -> Matrix<N> {
    assert_eq!(params.len(), N * N, "expected {} parameters", N * N);
    let mut h = Matrix::<N>::zeros();
    for k in 0..N {
        h.0[k][k] = c(params[k]);
    }
    let mut idx = N;
    for i in 0..N {
        for j in (i + 1)..N {
            let z = C64::new(params[idx], params[idx + 1]);
            h.0[i][j] = z;
            h.0[j][i] = z.conj();
            idx += 2;
        }
    }
    h
}

/// Expectation values of the fifteen non-trivial Pauli products in a
/// two-qubit pure state: `<s_k (x) I>`, `<I (x) s_k>`, `<s_k (x) s_l>`.
pub fn pauli_expectations(psi: &[C64; 4]) -> ([f64; 3], [f64; 3], [[f64; 3]; 3]) {
    let first = PauliAxis::ALL.map(|k| apply_expectation(psi, Some(k), None));
    let second = PauliAxis::ALL.map(|l| apply_expectation(psi, None, Some(l)));
    let corr =
        PauliAxis::ALL.map(|k| PauliAxis::ALL.map(|l| apply_expectation(psi, Some(k), Some(l))));
    (first, second, corr)
}

fn apply_pauli_on(psi: &[C64; 4], axis: PauliAxis, qubit: usize) -> [C64; 4] {
    // Qubit 0 is the high bit.
    let mask = if qubit == 0 { 2 } else { 1 };
    core::array::from_fn(|out| {
        let src = out
            ^ match axis {
                PauliAxis::Z => 0,
                _ => mask,
            };
        let bit_out = out & mask != 0;
        let factor = match axis {
            PauliAxis::X => ONE,
            // sigma_y |0> = i|1>, sigma_y |1> = -i|0>
            PauliAxis::Y => {
                if bit_out {
                    I
                } else {
                    -I
                }
            }
            PauliAxis::Z => {
                if bit_out {
                    -ONE
                } else {
                    ONE
                }
            }
        };
        factor * psi[src]
    })
}

fn apply_expectation(psi: &[C64; 4], first: Option<PauliAxis>, second: Option<PauliAxis>) -> f64 {
    let mut phi = *psi;
    if let Some(k) = first {
        phi = apply_pauli_on(&phi, k, 0);
    }
    if let Some(l) = second {
        phi = apply_pauli_on(&phi, l, 1);
    }
    inner(psi, &phi).re
}
