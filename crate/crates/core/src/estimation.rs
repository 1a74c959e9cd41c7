//! Average fidelity of a direction-guessing measurement.
//!
//! For a source emitting `rho(n) = (I + n.s)/2 (x) (I +- n.s)/2` with `n` drawn
//! from a prior, a measurement with projectors `P_j` and guesses `g_j` scores
//!
//! ```text
//! F = E_n sum_j Tr[P_j rho(n)] (1 + n.g_j)/2 = sum_j (w_j + g_j.v_j)/2
//! ```
//!
//! with `w_j = E[Tr P_j rho(n)]` and `v_j = E[n Tr P_j rho(n)]`. Expanding
//! `P_j` in Pauli products makes `Tr P_j rho(n)` a quadratic in `n`, so for the
//! uniform prior both moments follow exactly from `E[n_i] = 0`,
//! `E[n_i n_j] = delta_ij / 3` and `E[n_i n_j n_k] = 0`. Discrete priors are
//! finite sums. The optimal guess for outcome `j` is `v_j / |v_j|`.

use alloc::vec::Vec;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{bloch_to_spinor, pauli_expectations, tensor, Direction, Ket, TwoQubitState};
use crate::measurement::{tetrahedron, ProjectiveMeasurement};
use crate::rng::{domain, TrialRng};
use crate::stats::{self, Tally};

/// Tolerance on the total weight of a discrete prior.
pub const PRIOR_WEIGHT_TOL: f64 = 1e-10;
/// Below this `|v_j|` an outcome carries no directional information.
pub const UNINFORMATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    Parallel,
    Antiparallel,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::Parallel => "parallel",
            Pairing::Antiparallel => "antiparallel",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Pairing::Parallel => 1.0,
            Pairing::Antiparallel => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    UniformSphere,
    /// The four tetrahedron vertices, each with probability 1/4.
    Tetrahedron,
    Discrete(DiscretePrior),
}

impl Prior {
    pub fn name(&self) -> &'static str {
        match self {
            Prior::UniformSphere => "uniform",
            Prior::Tetrahedron => "tetrahedron",
            Prior::Discrete(_) => "discrete",
        }
    }

    /// `(direction, weight)` points, or `None` for the uniform prior.
    pub fn points(&self) -> Option<Vec<(Direction, f64)>> {
        match self {
            Prior::UniformSphere => None,
            Prior::Tetrahedron => Some(tetrahedron().vertices.iter().map(|&v| (v, 0.25)).collect()),
            Prior::Discrete(d) => Some(d.points.clone()),
        }
    }
}

/// Finitely many directions with non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePrior {
    points: Vec<(Direction, f64)>,
}

impl DiscretePrior {
    pub fn new(points: Vec<(Direction, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPrior {
                reason: "no points",
            });
        }
        if points.iter().any(|(_, w)| !(*w >= 0.0)) {
            return Err(Error::InvalidPrior {
                reason: "negative weight",
            });
        }
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        if !((total - 1.0).abs() <= PRIOR_WEIGHT_TOL) {
            return Err(Error::InvalidPrior {
                reason: "weights do not sum to 1",
            });
        }
        Ok(DiscretePrior { points })
    }

    pub fn points(&self) -> &[(Direction, f64)] {
        &self.points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pairing: Pairing,
    pub prior: Prior,
}

impl Scenario {
    pub fn new(pairing: Pairing, prior: Prior) -> Self {
        Scenario { pairing, prior }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FidelityMethod {
    Exact,
    MonteCarlo { trials: u64, std_error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub value: f64,
    pub method: FidelityMethod,
}

/// `|n, n>` or `|n, -n>`, both spinors with phase zero.
pub fn source_state(n: &Direction, pairing: Pairing) -> TwoQubitState {
    let first = bloch_to_spinor(n, 0.0);
    let second = match pairing {
        Pairing::Parallel => first,
        Pairing::Antiparallel => bloch_to_spinor(&-*n, 0.0),
    };
    tensor(&first, &second)
}

/// `p_j = |<b_j|psi>|^2`.
pub fn outcome_probabilities(m: &ProjectiveMeasurement, psi: &TwoQubitState) -> [f64; 4] {
    m.basis().map(|b| b.inner(psi).norm_sqr())
}

/// `(1 + n.g)/2`.
pub fn score(n: &Direction, g: &Direction) -> f64 {
    0.5 * (1.0 + n.dot(g))
}

/// Prior moments `w_j = E[Tr P_j rho(n)]` and `v_j = E[n Tr P_j rho(n)]` of
/// each outcome of a basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeMoments {
    pub weight: [f64; 4],
    pub direction: [[f64; 3]; 4],
}

impl OutcomeMoments {
    pub fn compute(basis: &[TwoQubitState; 4], scenario: &Scenario) -> Self {
        Self::compute_raw(&basis.map(|b| b.amplitudes()), scenario)
    }

    /// As [`OutcomeMoments::compute`] for unit vectors given as raw amplitudes.
    pub fn compute_raw(basis: &[[num_complex::Complex64; 4]; 4], scenario: &Scenario) -> Self {
        let sign = scenario.pairing.sign();
        let mut weight = [0.0; 4];
        let mut direction = [[0.0; 3]; 4];
        let points = scenario.prior.points();
        for (j, b) in basis.iter().enumerate() {
            let (first, second, corr) = pauli_expectations(b);
            match &points {
                None => {
                    let trace_corr = corr[0][0] + corr[1][1] + corr[2][2];
                    weight[j] = 0.25 * (1.0 + sign * trace_corr / 3.0);
                    for k in 0..3 {
                        direction[j][k] = 0.25 * (first[k] + sign * second[k]) / 3.0;
                    }
                }
                Some(points) => {
                    for (n, w) in points {
                        let n = n.to_array();
                        let mut quad = 0.0;
                        for k in 0..3 {
                            for l in 0..3 {
                                quad += n[k] * corr[k][l] * n[l];
                            }
                        }
                        let lin: f64 = (0..3).map(|k| n[k] * (first[k] + sign * second[k])).sum();
                        let p = 0.25 * (1.0 + lin + sign * quad);
                        weight[j] += w * p;
                        for k in 0..3 {
                            direction[j][k] += w * p * n[k];
                        }
                    }
                }
            }
        }
        OutcomeMoments { weight, direction }
    }

    pub fn fidelity(&self, guesses: &[Direction; 4]) -> f64 {
        (0..4)
            .map(|j| 0.5 * (self.weight[j] + guesses[j].dot_vector(&self.direction[j])))
            .sum()
    }

    pub fn optimal_guesses(&self) -> OptimalGuesses {
        let mut guesses = [Direction::PLUS_Z; 4];
        let mut uninformative = [false; 4];
        let mut fidelity = 0.0;
        for j in 0..4 {
            let v = self.direction[j];
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if len < UNINFORMATIVE_TOL {
                uninformative[j] = true;
            } else {
                guesses[j] = Direction::from_vector(v).expect("non-zero moment");
            }
            fidelity += 0.5 * (self.weight[j] + guesses[j].dot_vector(&v));
        }
        OptimalGuesses {
            guesses,
            fidelity,
            uninformative,
        }
    }
}

/// Exact prior-averaged fidelity, with no sampling error.
pub fn fidelity_exact(m: &ProjectiveMeasurement, scenario: &Scenario) -> FidelityReport {
    let value = OutcomeMoments::compute(m.basis(), scenario).fidelity(m.guesses());
    FidelityReport {
        value,
        method: FidelityMethod::Exact,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalGuesses {
    pub guesses: [Direction; 4],
    pub fidelity: f64,
    /// Outcomes with `|v_j| < 1e-12`; their guess is `+z`.
    pub uninformative: [bool; 4],
}

/// Best guess per outcome for a fixed basis, with the resulting fidelity.
pub fn optimal_guesses(basis: &[TwoQubitState; 4], scenario: &Scenario) -> OptimalGuesses {
    OutcomeMoments::compute(basis, scenario).optimal_guesses()
}

/// Draws a direction from the prior.
pub fn sample_prior(
    prior: &Prior,
    points: Option<&[(Direction, f64)]>,
    rng: &mut TrialRng,
) -> Direction {
    match (prior, points) {
        (Prior::UniformSphere, _) | (_, None) => rng.direction(),
        (_, Some(points)) => {
            let u = rng.uniform();
            let mut acc = 0.0;
            for (n, w) in points {
                acc += w;
                if u < acc {
                    return *n;
                }
            }
            // Rounding left u beyond the accumulated total.
            points
                .iter()
                .rev()
                .find(|(_, w)| *w > 0.0)
                .map(|p| p.0)
                .unwrap_or(points[0].0)
        }
    }
}

fn sample_outcome(probs: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    for (j, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(3)
}

/// Score of Monte-Carlo trial `index`: draw `n` from the prior, sample an
/// outcome from the Born probabilities, score its guess.
pub fn fidelity_trial(
    m: &ProjectiveMeasurement,
    scenario: &Scenario,
    points: Option<&[(Direction, f64)]>,
    seed: u64,
    index: u64,
) -> f64 {
    let mut rng = TrialRng::new(seed, domain::FIDELITY, index);
    let n = sample_prior(&scenario.prior, points, &mut rng);
    let probs = outcome_probabilities(m, &source_state(&n, scenario.pairing));
    let j = sample_outcome(&probs, rng.uniform());
    score(&n, &m.guesses()[j])
}

/// Tally of one block of Monte-Carlo trials (see [`crate::stats`]).
pub fn fidelity_block(
    m: &ProjectiveMeasurement,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
    block: u64,
) -> Tally {
    let points = scenario.prior.points();
    stats::tally_block(block, trials, |i| {
        fidelity_trial(m, scenario, points.as_deref(), seed, i)
    })
}

pub fn report_from_tally(tally: &Tally) -> FidelityReport {
    FidelityReport {
        value: tally.mean(),
        method: FidelityMethod::MonteCarlo {
            trials: tally.count,
            std_error: tally.std_error(),
        },
    }
}

/// Monte-Carlo estimate of the fidelity; deterministic in `(seed, trials)`.
pub fn fidelity_monte_carlo(
    m: &ProjectiveMeasurement,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<FidelityReport> {
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
        });
    }
    let points = scenario.prior.points();
    let tally = stats::tally_trials(trials, |i| {
        fidelity_trial(m, scenario, points.as_deref(), seed, i)
    });
    Ok(report_from_tally(&tally))
}
