//! The universal spin flip `|n> -> |-n>`.
//!
//! The exact map is anti-unitary. Its best physical approximation measures
//! the spin along some axis and prepares the state opposite to the result;
//! averaged over axes this is the channel `r -> -r/3` on Bloch vectors, with
//! fidelity 2/3 for every input. Because the machine only produces a
//! classical outcome, any number of flipped copies can be prepared from one
//! measurement.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{
    bloch_to_spinor, expm_i_hermitian, hermitian_from_params, pauli, DensityMatrix, Direction,
    Mat2, Matrix, PauliAxis, Spinor, C64,
};
use crate::optimizer::{nelder_mead, NelderMeadConfig};
use crate::rng::{domain, TrialRng};
use crate::stats::{self, Tally};

/// `V(a0, a1) = (-conj(a1), conj(a0))`: complex conjugation followed by
/// `[[0, -1], [1, 0]]`. Maps the Bloch vector `n` to `-n`.
pub fn antiunitary_flip(s: &Spinor) -> Spinor {
    Spinor::new(-s.a1().conj(), s.a0().conj()).expect("flip preserves the norm")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisMode {
    /// A fresh uniformly random axis per trial.
    Random,
    Fixed(Direction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Up => 1,
            Outcome::Down => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipTrialRecord {
    pub direction: Direction,
    pub axis: Direction,
    pub outcome: Outcome,
    /// Spinor pointing opposite to the observed outcome.
    pub prepared: Spinor,
    /// `|<-n|prepared>|^2`.
    pub fidelity: f64,
}

fn resolve_axis(axis: AxisMode, rng: &mut TrialRng) -> Direction {
    match axis {
        AxisMode::Random => rng.direction(),
        AxisMode::Fixed(a) => a,
    }
}

fn measure_and_prepare(
    input: &DensityMatrix<2>,
    axis: Direction,
    rng: &mut TrialRng,
) -> (Outcome, Direction) {
    let r = input.bloch_vector();
    let p_up = 0.5 * (1.0 + axis.dot_vector(&r));
    if rng.uniform() < p_up {
        (Outcome::Up, -axis)
    } else {
        (Outcome::Down, axis)
    }
}

fn trial_with(n: &Direction, axis: Direction, rng: &mut TrialRng) -> FlipTrialRecord {
    let (outcome, target) = measure_and_prepare(&bloch_to_spinor(n, 0.0).density(), axis, rng);
    let prepared = bloch_to_spinor(&target, 0.0);
    let fidelity = bloch_to_spinor(&-*n, 0.0).inner(&prepared).norm_sqr();
    FlipTrialRecord {
        direction: *n,
        axis,
        outcome,
        prepared,
        fidelity,
    }
}

/// One run of the measure-and-prepare machine on `|n>`.
pub fn uqsf_trial(n: &Direction, axis: AxisMode, seed: u64, index: u64) -> FlipTrialRecord {
    let mut rng = TrialRng::new(seed, domain::FLIP, index);
    let axis = resolve_axis(axis, &mut rng);
    trial_with(n, axis, &mut rng)
}

/// Trial `index` of the average-fidelity experiment: uniform input, then the
/// machine.
pub fn uqsf_random_input_trial(axis: AxisMode, seed: u64, index: u64) -> FlipTrialRecord {
    let mut rng = TrialRng::new(seed, domain::FLIP, index);
    let n = rng.direction();
    let axis = resolve_axis(axis, &mut rng);
    trial_with(&n, axis, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipSummary {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl From<Tally> for FlipSummary {
    fn from(t: Tally) -> Self {
        FlipSummary {
            trials: t.count,
            mean: t.mean(),
            std_error: t.std_error(),
        }
    }
}

pub fn uqsf_block(axis: AxisMode, trials: u64, seed: u64, block: u64) -> Tally {
    stats::tally_block(block, trials, |i| {
        uqsf_random_input_trial(axis, seed, i).fidelity
    })
}

/// Mean per-trial fidelity over uniformly distributed inputs.
pub fn uqsf_average_fidelity(trials: u64, seed: u64, axis: AxisMode) -> Result<FlipSummary> {
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
        });
    }
    Ok(stats::tally_trials(trials, |i| uqsf_random_input_trial(axis, seed, i).fidelity).into())
}

/// Axis-averaged measure-and-prepare channel: Bloch vector `r -> -r/3`.
pub fn uqsf_channel(rho: &DensityMatrix<2>) -> DensityMatrix<2> {
    let r = rho.bloch_vector();
    DensityMatrix::from_bloch(r.map(|x| -x / 3.0)).expect("contraction stays in the ball")
}

/// Monte-Carlo estimate of the channel output: the mean prepared density
/// matrix over `trials` random-axis runs, with an entrywise standard error
/// (real and imaginary parts combined in quadrature).
pub fn uqsf_channel_monte_carlo(
    rho: &DensityMatrix<2>,
    trials: u64,
    seed: u64,
) -> Result<(Mat2, [[f64; 2]; 2])> {
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
        });
    }
    let mut sum = [[C64::new(0.0, 0.0); 2]; 2];
    let mut sum_sq = [[[0.0f64; 2]; 2]; 2];
    for i in 0..trials {
        let mut rng = TrialRng::new(seed, domain::FLIP, i);
        let axis = rng.direction();
        let (_, target) = measure_and_prepare(rho, axis, &mut rng);
        let out = bloch_to_spinor(&target, 0.0).density();
        for a in 0..2 {
            for b in 0..2 {
                let z = out.matrix().0[a][b];
                sum[a][b] += z;
                sum_sq[a][b][0] += z.re * z.re;
                sum_sq[a][b][1] += z.im * z.im;
            }
        }
    }
    let n = trials as f64;
    let mean = Matrix(sum.map(|row| row.map(|z| z / n)));
    let mut err = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let m = mean.0[a][b];
            if trials > 1 {
                let var_re = ((sum_sq[a][b][0] - n * m.re * m.re) / (n - 1.0)).max(0.0);
                let var_im = ((sum_sq[a][b][1] - n * m.im * m.im) / (n - 1.0)).max(0.0);
                err[a][b] = ((var_re + var_im) / n).sqrt();
            }
        }
    }
    Ok((mean, err))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticopyTrial {
    pub record: FlipTrialRecord,
    /// Every copy is prepared from the same classical outcome.
    pub copies: Vec<Spinor>,
    pub fidelities: Vec<f64>,
    pub average: f64,
}

/// One measurement of `|n>`, then `copies` identical flipped spins.
pub fn uqsf_multicopy(
    n: &Direction,
    copies: usize,
    axis: AxisMode,
    seed: u64,
    index: u64,
) -> Result<MulticopyTrial> {
    if copies == 0 {
        return Err(Error::TooFew {
            what: "copies",
            min: 1,
        });
    }
    let record = uqsf_trial(n, axis, seed, index);
    Ok(multicopy_from(record, copies))
}

fn multicopy_from(record: FlipTrialRecord, copies: usize) -> MulticopyTrial {
    let target = bloch_to_spinor(&-record.direction, 0.0);
    let prepared = vec![record.prepared; copies];
    let fidelities: Vec<f64> = prepared
        .iter()
        .map(|s| target.inner(s).norm_sqr())
        .collect();
    let average = fidelities.iter().sum::<f64>() / copies as f64;
    MulticopyTrial {
        record,
        copies: prepared,
        fidelities,
        average,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticopySummary {
    pub trials: u64,
    pub copies: usize,
    pub per_copy: Vec<FlipSummary>,
}

/// Per-copy mean fidelity over uniform random inputs.
pub fn uqsf_multicopy_average(
    copies: usize,
    trials: u64,
    seed: u64,
    axis: AxisMode,
) -> Result<MulticopySummary> {
    if copies == 0 {
        return Err(Error::TooFew {
            what: "copies",
            min: 1,
        });
    }
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
        });
    }
    let mut tallies = vec![Tally::default(); copies];
    for i in 0..trials {
        let trial = multicopy_from(uqsf_random_input_trial(axis, seed, i), copies);
        for (t, f) in tallies.iter_mut().zip(&trial.fidelities) {
            t.push(*f);
        }
    }
    Ok(MulticopySummary {
        trials,
        copies,
        per_copy: tallies.into_iter().map(FlipSummary::from).collect(),
    })
}

/// Exact average flip fidelity `E_n |<-n|U|n>|^2` of a unitary:
/// `(2 - sum_k Re Tr(U s_k U^H s_k)/3) / 4`.
pub fn unitary_flip_fidelity(u: &Mat2) -> f64 {
    let s: f64 = PauliAxis::ALL
        .iter()
        .map(|&k| (pauli(k).conjugate_by(u) * pauli(k)).trace().re)
        .sum();
    0.25 * (2.0 - s / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryFlipCeiling {
    pub fidelity: f64,
    pub unitary: Mat2,
}

/// Best average flip fidelity over all single-qubit unitaries `exp(iH)`.
pub fn best_unitary_flip_fidelity(starts: usize, seed: u64) -> Result<UnitaryFlipCeiling> {
    if starts == 0 {
        return Err(Error::TooFew {
            what: "starts",
            min: 1,
        });
    }
    let cfg = NelderMeadConfig {
        diameter_tol: 1e-12,
        ..Default::default()
    };
    let to_unitary =
        |p: &[f64]| expm_i_hermitian(&hermitian_from_params::<2>(p)).expect("Hermitian");
    let mut best: Option<UnitaryFlipCeiling> = None;
    for start in 0..starts {
        let mut rng = TrialRng::new(seed, domain::UNITARY_FLIP, start as u64);
        let x0: [f64; 4] =
            core::array::from_fn(|_| rng.uniform_in(-core::f64::consts::PI, core::f64::consts::PI));
        let out = nelder_mead(|p| -unitary_flip_fidelity(&to_unitary(p)), &x0, &cfg);
        let u = to_unitary(&out.x);
        let candidate = UnitaryFlipCeiling {
            fidelity: unitary_flip_fidelity(&u),
            unitary: u,
        };
        if best.is_none_or(|b| candidate.fidelity > b.fidelity) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one start"))
}

/// Fidelity of a prepared qubit state against `|-n>`.
pub fn flip_fidelity(n: &Direction, out: &DensityMatrix<2>) -> f64 {
    out.expectation(&bloch_to_spinor(&-*n, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::spinor_to_bloch;

    const ONE: C64 = C64::new(1.0, 0.0);
    const ZERO: C64 = C64::new(0.0, 0.0);

    #[test]
    fn flip_of_up_is_down() {
        let up = Spinor::new(ONE, ZERO).unwrap();
        let down = antiunitary_flip(&up);
        assert!((down.inner(&Spinor::new(ZERO, ONE).unwrap()).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flip_negates_bloch_vector() {
        let mut rng = TrialRng::stream(1, 0);
        for _ in 0..1000 {
            let s = Spinor::normalized(
                C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5),
                C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5),
            )
            .unwrap();
            let n = spinor_to_bloch(&s).unwrap().to_array();
            let m = spinor_to_bloch(&antiunitary_flip(&s)).unwrap().to_array();
            for k in 0..3 {
                assert!((n[k] + m[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flip_is_antilinear() {
        // a = |0>, b = i|1>. The linear map agreeing with V on |0>, |1> sends
        // (a + b)/sqrt 2 to a state orthogonal to V((a + b)/sqrt 2).
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let sum = Spinor::new(C64::new(h, 0.0), i * h).unwrap();
        let v0 = antiunitary_flip(&Spinor::new(ONE, ZERO).unwrap());
        let v1 = antiunitary_flip(&Spinor::new(ZERO, ONE).unwrap());
        let linear = Spinor::normalized(v0.a0() + i * v1.a0(), v0.a1() + i * v1.a1()).unwrap();
        let actual = antiunitary_flip(&sum);
        assert!(actual.inner(&linear).norm() < 1e-12);
        // Additivity alone still holds: V(a) + V(b) matches V(a + b).
        let vb = antiunitary_flip(&Spinor::new(ZERO, i).unwrap());
        let additive = Spinor::normalized(v0.a0() + vb.a0(), v0.a1() + vb.a1()).unwrap();
        assert!((actual.inner(&additive).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trial_extremes() {
        let z = Direction::PLUS_Z;
        for i in 0..20 {
            let r = uqsf_trial(&z, AxisMode::Fixed(z), 3, i);
            assert_eq!(r.outcome, Outcome::Up);
            assert!(
                (r.prepared.inner(&Spinor::new(ZERO, ONE).unwrap()).norm() - 1.0).abs() < 1e-15
            );
            assert!((r.fidelity - 1.0).abs() < 1e-15);
            // Anti-aligned input: outcome -axis = n, prepared +axis = -n.
            let r = uqsf_trial(&-z, AxisMode::Fixed(z), 3, i);
            assert_eq!(r.outcome, Outcome::Down);
            assert!((r.fidelity - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_axis_trial_expectation() {
        let n = Direction::new(1.0, 0.0, 0.0).unwrap();
        // Either outcome is orthogonal to n, so every trial scores exactly 1/2.
        let t = stats::tally_trials(2_000, |i| {
            uqsf_trial(&n, AxisMode::Fixed(Direction::PLUS_Z), 8, i).fidelity
        });
        assert!((t.mean() - 0.5).abs() < 1e-12);
        // Expected per-trial fidelity (1 + c^2)/2 at c = n.axis.
        let n = Direction::new(0.6, 0.0, 0.8).unwrap();
        let t = stats::tally_trials(50_000, |i| {
            uqsf_trial(&n, AxisMode::Fixed(Direction::PLUS_Z), 8, i).fidelity
        });
        assert!((t.mean() - 0.5 * (1.0 + 0.64)).abs() < 4.0 * t.std_error());
    }

    #[test]
    fn average_fidelity_two_thirds() {
        for axis in [AxisMode::Random, AxisMode::Fixed(Direction::PLUS_Z)] {
            let s = uqsf_average_fidelity(100_000, 42, axis).unwrap();
            assert!(
                (s.mean - 2.0 / 3.0).abs() < 4.0 * s.std_error,
                "{axis:?}: {s:?}"
            );
        }
        assert!(uqsf_average_fidelity(0, 1, AxisMode::Random).is_err());
    }

    #[test]
    fn channel_examples() {
        let mut rng = TrialRng::stream(2, 0);
        for _ in 0..100 {
            let n = rng.direction();
            let out = uqsf_channel(&bloch_to_spinor(&n, 0.0).density());
            assert!((flip_fidelity(&n, &out) - 2.0 / 3.0).abs() < 1e-12);
        }
        let mixed = DensityMatrix::<2>::maximally_mixed();
        assert!(uqsf_channel(&mixed).matrix().max_abs_diff(mixed.matrix()) < 1e-15);
        let out = uqsf_channel(&DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap()).bloch_vector();
        assert!(out[0].abs() < 1e-15 && out[1].abs() < 1e-15 && (out[2] + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn channel_is_linear_and_trace_preserving() {
        let mut rng = TrialRng::stream(4, 0);
        for _ in 0..50 {
            let a = DensityMatrix::from_bloch(rng.direction().to_array()).unwrap();
            let b = DensityMatrix::from_bloch(rng.direction().to_array().map(|x| 0.5 * x)).unwrap();
            let p = rng.uniform();
            let mix = DensityMatrix::new(
                a.matrix().scale(C64::new(p, 0.0)) + b.matrix().scale(C64::new(1.0 - p, 0.0)),
            )
            .unwrap();
            let lhs = uqsf_channel(&mix);
            let rhs = uqsf_channel(&a).matrix().scale(C64::new(p, 0.0))
                + uqsf_channel(&b).matrix().scale(C64::new(1.0 - p, 0.0));
            assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-12);
            assert!((lhs.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn multicopy_copies_identical() {
        let n = Direction::new(0.0, 0.6, 0.8).unwrap();
        let t = uqsf_multicopy(&n, 7, AxisMode::Random, 5, 3).unwrap();
        assert!(t.copies.iter().all(|c| *c == t.copies[0]));
        let single = uqsf_multicopy(&n, 1, AxisMode::Random, 5, 3).unwrap();
        assert_eq!(single.record, uqsf_trial(&n, AxisMode::Random, 5, 3));
        assert_eq!(single.average, single.record.fidelity);
        assert!(uqsf_multicopy(&n, 0, AxisMode::Random, 5, 3).is_err());
    }

    #[test]
    fn unitary_flip_values() {
        assert!(unitary_flip_fidelity(&Mat2::identity()).abs() < 1e-15);
        // pi rotation about z: exp(-i pi sigma_z / 2) = -i sigma_z.
        let rz = pauli(PauliAxis::Z).scale(C64::new(0.0, -1.0));
        assert!((unitary_flip_fidelity(&rz) - 2.0 / 3.0).abs() < 1e-15);
        let best = best_unitary_flip_fidelity(5, 7).unwrap();
        assert!((best.fidelity - 2.0 / 3.0).abs() < 1e-6);
    }
}
