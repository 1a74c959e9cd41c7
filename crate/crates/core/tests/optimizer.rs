//! Multi-start searches against the known optima.

use dirq_core::estimation::{fidelity_exact, Pairing, Prior, Scenario};
use dirq_core::optimizer::{optimize, optimize_product, Constraint, OptimizerConfig};

const SEED: u64 = 2024;

fn full(pairing: Pairing, prior: Prior, starts: usize) -> f64 {
    let scenario = Scenario::new(pairing, prior);
    let result = optimize(
        &scenario,
        &OptimizerConfig::new(Constraint::Full, starts, SEED),
    )
    .unwrap();
    let exact = fidelity_exact(&result.best_measurement, &scenario).value;
    assert!((result.best_fidelity - exact).abs() < 1e-10);
    assert!(result.best_fidelity <= 1.0 + 1e-12);
    assert!(result
        .starts
        .iter()
        .all(|s| s.fidelity <= result.best_fidelity + 1e-10));
    result.best_fidelity
}

#[test]
fn full_search_reaches_known_optima() {
    let par = full(Pairing::Parallel, Prior::UniformSphere, 20);
    let anti = full(Pairing::Antiparallel, Prior::UniformSphere, 20);
    let tetra = full(Pairing::Antiparallel, Prior::Tetrahedron, 20);
    assert!((0.75 - 1e-3..=0.75 + 1e-6).contains(&par), "{par}");
    assert!(anti >= 0.78867 - 1e-3, "{anti}");
    assert!(tetra >= 0.95528 - 1e-3, "{tetra}");
    assert!(anti - par >= 0.035);
}

#[test]
fn product_search_is_blind_to_pairing() {
    for seed in [1, 2, 3] {
        let par = optimize_product(
            &Scenario::new(Pairing::Parallel, Prior::UniformSphere),
            10,
            seed,
        )
        .unwrap();
        let anti = optimize_product(
            &Scenario::new(Pairing::Antiparallel, Prior::UniformSphere),
            10,
            seed,
        )
        .unwrap();
        assert!(par.best_fidelity < 0.75 - 1e-3, "{}", par.best_fidelity);
        assert!((par.best_fidelity - anti.best_fidelity).abs() < 2e-3);
        // 1/2 + sqrt(2)/6
        assert!((anti.best_fidelity - (0.5 + 2f64.sqrt() / 6.0)).abs() < 1e-6);
    }
}

#[test]
fn entangled_search_beats_product_search() {
    let scenario = Scenario::new(Pairing::Antiparallel, Prior::UniformSphere);
    let product = optimize_product(&scenario, 10, SEED).unwrap().best_fidelity;
    let entangled = full(Pairing::Antiparallel, Prior::UniformSphere, 5);
    assert!(entangled - product > 0.05, "{entangled} vs {product}");
}

#[test]
fn single_start_without_iterations() {
    let scenario = Scenario::new(Pairing::Parallel, Prior::UniformSphere);
    let mut cfg = OptimizerConfig::new(Constraint::Product, 1, 9);
    cfg.nelder_mead.max_evaluations = 1;
    let result = optimize(&scenario, &cfg).unwrap();
    assert!((0.0..=1.0).contains(&result.best_fidelity));
    assert_eq!(result.starts[0].evaluations, 1);
}

#[test]
fn seeds_reproduce() {
    let scenario = Scenario::new(Pairing::Antiparallel, Prior::Tetrahedron);
    let cfg = OptimizerConfig::new(Constraint::Full, 2, 77);
    assert_eq!(
        optimize(&scenario, &cfg).unwrap(),
        optimize(&scenario, &cfg).unwrap()
    );
}
