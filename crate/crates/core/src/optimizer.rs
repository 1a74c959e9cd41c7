//! Multi-start Nelder-Mead search over two-qubit projective measurements.
//!
//! A full measurement is the column set of `exp(iH)` for a Hermitian `H`
//! given by 16 reals. The product-constrained search uses two single-qubit
//! unitaries (4 reals each) and the basis `u_a (x) v_b`. Guesses are never
//! searched: every evaluation uses the closed-form optimal guesses.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // float methods under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::estimation::{fidelity_exact, OutcomeMoments, Scenario};
use crate::hilbert::{expm_i_hermitian, hermitian_from_params, Matrix, TwoQubitState, C64};
use crate::measurement::ProjectiveMeasurement;
use crate::rng::{domain, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub initial_step: f64,
    /// Stop once every vertex is this close to the best one.
    pub diameter_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.3,
            diameter_tol: 1e-9,
            max_evaluations: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0`. `max_evaluations = 0` returns `f(x0)` with no
/// iterations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    cfg: &NelderMeadConfig,
) -> NelderMeadOutcome {
    let dim = x0.len();
    let mut evaluations = 1;
    let f0 = f(x0);
    if cfg.max_evaluations <= 1 || dim == 0 {
        return NelderMeadOutcome {
            x: x0.to_vec(),
            value: f0,
            evaluations,
            iterations: 0,
            converged: false,
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f0));
    for k in 0..dim {
        let mut x = x0.to_vec();
        x[k] += cfg.initial_step;
        let fx = f(&x);
        evaluations += 1;
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let point = |base: &[f64], toward: &[f64], t: f64| -> Vec<f64> {
        base.iter()
            .zip(toward)
            .map(|(b, w)| b + t * (w - b))
            .collect()
    };

    loop {
        // Stable sort keeps the earlier vertex first on ties.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < cfg.diameter_tol {
            converged = true;
            break;
        }
        if evaluations >= cfg.max_evaluations {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let best_value = simplex[0].1;
        let second_worst = simplex[dim - 1].1;

        let reflected = point(&centroid, &worst.0, -cfg.reflection);
        let fr = f(&reflected);
        evaluations += 1;

        if fr < best_value {
            let expanded = point(&centroid, &worst.0, -cfg.reflection * cfg.expansion);
            let fe = f(&expanded);
            evaluations += 1;
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < second_worst {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let xc = point(&centroid, &reflected, cfg.contraction);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst.0, cfg.contraction);
            let fc = f(&xc);
            (xc, fc)
        };
        evaluations += 1;
        if fc < worst.1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            vertex.0 = point(&best, &vertex.0, cfg.shrink);
            vertex.1 = f(&vertex.0);
            evaluations += 1;
        }
    }

    let (x, value) = simplex.swap_remove(0);
    NelderMeadOutcome {
        x,
        value,
        evaluations,
        iterations,
        converged,
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Which family of bases is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Any orthonormal basis: columns of `exp(iH)`, 16 parameters.
    Full,
    /// Products of single-qubit bases, 8 parameters.
    Product,
}

impl Constraint {
    pub fn parameter_count(self) -> usize {
        match self {
            Constraint::Full => 16,
            Constraint::Product => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Full => "full",
            Constraint::Product => "product",
        }
    }
}

/// Basis vectors (raw amplitudes) for a parameter vector.
pub fn basis_from_params(constraint: Constraint, params: &[f64]) -> [[C64; 4]; 4] {
    match constraint {
        Constraint::Full => {
            let u = expm_i_hermitian(&hermitian_from_params::<4>(params))
                .expect("generator is Hermitian");
            core::array::from_fn(|j| u.column(j))
        }
        Constraint::Product => {
            let a = expm_i_hermitian(&hermitian_from_params::<2>(&params[..4])).expect("Hermitian");
            let b = expm_i_hermitian(&hermitian_from_params::<2>(&params[4..])).expect("Hermitian");
            core::array::from_fn(|j| {
                let (ca, cb) = (a.column(j / 2), b.column(j % 2));
                [ca[0] * cb[0], ca[0] * cb[1], ca[1] * cb[0], ca[1] * cb[1]]
            })
        }
    }
}

/// `exp(iH)` from the 16-parameter encoding of `H`.
pub fn unitary_from_params(params: &[f64; 16]) -> Matrix<4> {
    expm_i_hermitian(&hermitian_from_params::<4>(params)).expect("generator is Hermitian")
}

/// Fidelity of the basis given by `params`, with optimal guesses.
pub fn objective(constraint: Constraint, params: &[f64], scenario: &Scenario) -> f64 {
    let basis = basis_from_params(constraint, params);
    OutcomeMoments::compute_raw(&basis, scenario)
        .optimal_guesses()
        .fidelity
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    pub constraint: Constraint,
    pub nelder_mead: NelderMeadConfig,
}

impl OptimizerConfig {
    pub fn new(constraint: Constraint, starts: usize, seed: u64) -> Self {
        OptimizerConfig {
            starts,
            seed,
            constraint,
            nelder_mead: NelderMeadConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub index: usize,
    pub fidelity: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_fidelity: f64,
    pub best_measurement: ProjectiveMeasurement,
    pub best_start: usize,
    pub starts: Vec<StartOutcome>,
}

/// Initial parameters of start `index`, uniform in `[-pi, pi)`.
pub fn initial_params(constraint: Constraint, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = TrialRng::new(seed, domain::OPTIMIZER, index as u64);
    (0..constraint.parameter_count())
        .map(|_| rng.uniform_in(-PI, PI))
        .collect()
}

/// Runs a single start; independent of every other start.
pub fn run_start(scenario: &Scenario, cfg: &OptimizerConfig, index: usize) -> StartOutcome {
    let x0 = initial_params(cfg.constraint, cfg.seed, index);
    let out = nelder_mead(
        |p| -objective(cfg.constraint, p, scenario),
        &x0,
        &cfg.nelder_mead,
    );
    StartOutcome {
        index,
        fidelity: -out.value,
        evaluations: out.evaluations,
        iterations: out.iterations,
        converged: out.converged,
        params: out.x,
    }
}

/// Picks the best start (lowest index on ties) and re-evaluates it exactly.
pub fn collect(
    scenario: &Scenario,
    cfg: &OptimizerConfig,
    mut starts: Vec<StartOutcome>,
) -> Result<OptimizationResult> {
    if starts.is_empty() {
        return Err(Error::TooFew {
            what: "starts",
            min: 1,
        });
    }
    starts.sort_by_key(|s| s.index);
    let mut best = 0;
    for (k, s) in starts.iter().enumerate() {
        if s.fidelity > starts[best].fidelity {
            best = k;
        }
    }
    let best_start = &starts[best];
    let measurement = measurement_from_params(cfg.constraint, &best_start.params, scenario)?;
    let best_fidelity = fidelity_exact(&measurement, scenario).value;
    Ok(OptimizationResult {
        best_fidelity,
        best_measurement: measurement,
        best_start: best_start.index,
        starts,
    })
}

/// The measurement for `params` with optimal guesses attached.
pub fn measurement_from_params(
    constraint: Constraint,
    params: &[f64],
    scenario: &Scenario,
) -> Result<ProjectiveMeasurement> {
    let raw = basis_from_params(constraint, params);
    let basis = raw.map(|v| TwoQubitState::normalized(v).expect("unitary column"));
    let guesses = OutcomeMoments::compute_raw(&raw, scenario)
        .optimal_guesses()
        .guesses;
    let label = match constraint {
        Constraint::Full => "optimized",
        Constraint::Product => "optimized-product",
    };
    ProjectiveMeasurement::new(basis, guesses, label)
}

/// Multi-start search; deterministic given `cfg.seed`.
pub fn optimize(scenario: &Scenario, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    if cfg.starts == 0 {
        return Err(Error::TooFew {
            what: "starts",
            min: 1,
        });
    }
    let starts = (0..cfg.starts)
        .map(|i| run_start(scenario, cfg, i))
        .collect();
    collect(scenario, cfg, starts)
}

/// [`optimize`] restricted to product bases.
pub fn optimize_product(
    scenario: &Scenario,
    starts: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    optimize(
        scenario,
        &OptimizerConfig::new(Constraint::Product, starts, seed),
    )
}

/// Same basis, every guess replaced by its antipode.
pub fn flip_second_guess_rule(m: &ProjectiveMeasurement) -> ProjectiveMeasurement {
    m.with_guesses(m.guesses().map(|g| -g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{Pairing, Prior};
    use crate::measurement::build_parallel_optimal;

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let cfg = NelderMeadConfig {
            diameter_tol: 1e-10,
            ..Default::default()
        };
        let out = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &cfg,
        );
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-8 && (out.x[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let out = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &NelderMeadConfig::default(),
        );
        assert!(out.value < 1e-12, "{}", out.value);
    }

    #[test]
    fn zero_budget_evaluates_start_only() {
        let cfg = NelderMeadConfig {
            max_evaluations: 0,
            ..Default::default()
        };
        let out = nelder_mead(|x| x[0] * x[0], &[3.0], &cfg);
        assert_eq!((out.value, out.evaluations, out.iterations), (9.0, 1, 0));
    }

    #[test]
    fn full_parameterization_is_unitary() {
        for seed in 0..100 {
            let mut rng = TrialRng::stream(seed, 123);
            let params: [f64; 16] = core::array::from_fn(|_| rng.uniform_in(-2.5, 2.5));
            let u = unitary_from_params(&params);
            assert!((u.adjoint() * u).max_abs_diff(&Matrix::identity()) < 1e-10);
        }
    }

    #[test]
    fn product_basis_is_product() {
        let params = initial_params(Constraint::Product, 1, 0);
        let raw = basis_from_params(Constraint::Product, &params);
        for v in raw {
            let det = v[0] * v[3] - v[1] * v[2];
            assert!(det.norm() < 1e-12);
        }
    }

    #[test]
    fn single_start_no_iterations_in_unit_interval() {
        let s = Scenario::new(Pairing::Parallel, Prior::UniformSphere);
        let mut cfg = OptimizerConfig::new(Constraint::Product, 1, 5);
        cfg.nelder_mead.max_evaluations = 0;
        let r = optimize(&s, &cfg).unwrap();
        assert_eq!(r.starts[0].iterations, 0);
        assert!((0.0..=1.0).contains(&r.best_fidelity));
        let direct = objective(
            Constraint::Product,
            &initial_params(Constraint::Product, 5, 0),
            &s,
        );
        assert!((r.best_fidelity - direct).abs() < 1e-12);
    }

    #[test]
    fn zero_starts_rejected() {
        let s = Scenario::new(Pairing::Parallel, Prior::UniformSphere);
        assert!(optimize(&s, &OptimizerConfig::new(Constraint::Full, 0, 1)).is_err());
    }

    #[test]
    fn guess_flip_is_involution() {
        let m = build_parallel_optimal().unwrap();
        let f = flip_second_guess_rule(&m);
        for (a, b) in m.guesses().iter().zip(f.guesses()) {
            assert_eq!(*b, -*a);
        }
        assert_eq!(flip_second_guess_rule(&f), m);
    }

    #[test]
    fn guess_flip_does_not_transfer_entangled_measurement() {
        let m = build_parallel_optimal().unwrap();
        let par = fidelity_exact(&m, &Scenario::new(Pairing::Parallel, Prior::UniformSphere)).value;
        let flipped = flip_second_guess_rule(&m);
        let anti = fidelity_exact(
            &flipped,
            &Scenario::new(Pairing::Antiparallel, Prior::UniformSphere),
        )
        .value;
        assert!((par - 0.75).abs() < 1e-12);
        assert!((par - anti).abs() > 0.1, "{par} vs {anti}");
    }
}
