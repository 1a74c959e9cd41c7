//! Long Monte-Carlo and brute-force checks.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::thread;

use dirq_core::estimation::{
    fidelity_exact, fidelity_monte_carlo, FidelityMethod, Pairing, Prior, Scenario,
};
use dirq_core::flip::{
    best_unitary_flip_fidelity, unitary_flip_fidelity, uqsf_channel, uqsf_channel_monte_carlo,
};
use dirq_core::hilbert::{bloch_to_spinor, pauli_dot, DensityMatrix, Direction, Mat2, C64};
use dirq_core::measurement::{
    build_antiparallel, build_parallel_optimal, default_alpha, default_beta,
};

#[test]
fn monte_carlo_tracks_exact_over_100_seeds() {
    let par = build_parallel_optimal().unwrap();
    let anti = build_antiparallel(default_alpha(), default_beta()).unwrap();
    let cases = [
        (par, Scenario::new(Pairing::Parallel, Prior::UniformSphere)),
        (
            anti,
            Scenario::new(Pairing::Antiparallel, Prior::UniformSphere),
        ),
    ];
    let workers = thread::available_parallelism()
        .map_or(4, |n| n.get())
        .min(16);
    let seeds: Vec<u64> = (0..100).collect();
    let within: usize = thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(seeds.len().div_ceil(workers))
            .map(|chunk| {
                let cases = &cases;
                s.spawn(move || {
                    chunk
                        .iter()
                        .filter(|&&seed| {
                            let (m, scenario) = &cases[(seed % 2) as usize];
                            let exact = fidelity_exact(m, scenario).value;
                            let mc = fidelity_monte_carlo(m, scenario, 1_000_000, seed).unwrap();
                            let FidelityMethod::MonteCarlo { std_error, .. } = mc.method else {
                                panic!("expected a Monte-Carlo report")
                            };
                            (mc.value - exact).abs() < 5.0 * std_error
                        })
                        .count()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });
    assert!(
        within >= 99,
        "only {within}/100 seeds within 5 standard errors"
    );
}

#[test]
fn channel_monte_carlo_matches_closed_form() {
    let rho = DensityMatrix::from_bloch([0.3, -0.5, 0.6]).unwrap();
    let (mean, err) = uqsf_channel_monte_carlo(&rho, 1_000_000, 31).unwrap();
    let want = uqsf_channel(&rho);
    for a in 0..2 {
        for b in 0..2 {
            let d = (mean.0[a][b] - want.matrix().0[a][b]).norm();
            assert!(d < 5.0 * err[a][b], "entry ({a},{b}): {d} vs {}", err[a][b]);
        }
    }
}

/// Input and target spinors on the octahedron `+-x, +-y, +-z`, a rule that
/// integrates quadratic functions on the sphere exactly.
fn octahedron() -> Vec<([C64; 2], [C64; 2])> {
    let points = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    points
        .iter()
        .map(|p| {
            let n = Direction::from_vector(*p).unwrap();
            let (s, t) = (bloch_to_spinor(&n, 0.0), bloch_to_spinor(&-n, 0.0));
            ([s.a0(), s.a1()], [t.a0(), t.a1()])
        })
        .collect()
}

fn quadrature_flip_fidelity(u: &Mat2, rule: &[([C64; 2], [C64; 2])]) -> f64 {
    rule.iter()
        .map(|(s, t)| {
            let out = u.mul_vec(s);
            (t[0].conj() * out[0] + t[1].conj() * out[1]).norm_sqr()
        })
        .sum::<f64>()
        / rule.len() as f64
}

/// `exp(-i angle n.sigma / 2)`.
fn axis_angle(n: [f64; 3], angle: f64) -> Mat2 {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Mat2::identity().scale(C64::new(c, 0.0)) + pauli_dot(&n).scale(C64::new(0.0, -s))
}

#[test]
fn unitary_ceiling_agrees_with_grid() {
    let deg = PI / 180.0;
    let rule = octahedron();
    let mut grid_best = f64::NEG_INFINITY;
    for polar in 0..=180 {
        let theta = polar as f64 * deg;
        let azimuths = if polar == 0 || polar == 180 { 1 } else { 360 };
        for az in 0..azimuths {
            let phi = az as f64 * deg;
            let n = [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ];
            for a in 0..=360 {
                let u = axis_angle(n, a as f64 * deg);
                let f = quadrature_flip_fidelity(&u, &rule);
                // The closed form and the quadrature must agree everywhere.
                assert!((f - unitary_flip_fidelity(&u)).abs() < 1e-12);
                grid_best = grid_best.max(f);
            }
        }
    }
    let best = best_unitary_flip_fidelity(10, 3).unwrap();
    assert!((best.fidelity - grid_best).abs() < 1e-4);
    assert!((best.fidelity - 2.0 / 3.0).abs() < 1e-6);
}
