//! One line per acceptance criterion. Runs without the test harness so the
//! lines always show up in the output.

use std::process::Command;
use std::time::{Duration, Instant};

use dirq::oracle::unitary_flip_grid;
use dirq_core::estimation::{fidelity_exact, Pairing, Prior, Scenario};
use dirq_core::flip::{
    antiunitary_flip, best_unitary_flip_fidelity, flip_fidelity, uqsf_average_fidelity,
    uqsf_channel, uqsf_multicopy_average, AxisMode,
};
use dirq_core::hilbert::{
    bloch_to_spinor, expm_i_hermitian, hermitian_from_params, pure_density, singlet, tensor, Mat2,
    PauliAxis,
};
use dirq_core::measurement::{
    antiparallel_coefficients_from_gram, antiparallel_states, build_antiparallel,
    build_parallel_optimal, default_alpha, default_beta, fix_phases_antiparallel, gram_matrix,
    ProjectiveMeasurement,
};
use dirq_core::optimizer::{optimize, Constraint, OptimizerConfig};
use dirq_core::rng::TrialRng;
use dirq_core::statespace::{pair_overlaps, span_rank};
use dirq_core::transpose::{
    flipped_projector_defects, mirror_plus_rotation_flip, negativity,
    passive_flip_equivalence_product, product_basis, reflection_identity_check,
};

const SEED: u64 = 7;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn rng(tag: u64) -> TrialRng {
    TrialRng::stream(SEED, 1000 + tag)
}

fn random_unitary(r: &mut TrialRng) -> Mat2 {
    let p: Vec<f64> = (0..4).map(|_| r.uniform_in(-3.0, 3.0)).collect();
    expm_i_hermitian(&hermitian_from_params::<2>(&p)).unwrap()
}

fn exact(m: &ProjectiveMeasurement, pairing: Pairing, prior: Prior) -> f64 {
    fidelity_exact(m, &Scenario::new(pairing, prior)).value
}

fn closed_forms() -> (f64, f64) {
    let r3 = 3f64.sqrt();
    let d = 3.0 * (3.0 * r3 - 1.0).powi(2);
    ((5.0 * r3 + 33.0) / d, (2.0 * r3 + 47.0) / d)
}

fn c1() -> Outcome {
    let m = build_parallel_optimal().unwrap();
    let (f, t) = timed(|| exact(&m, Pairing::Parallel, Prior::UniformSphere));
    outcome(
        (f - 0.75).abs() < 1e-9 && t < Duration::from_secs(1),
        format!("F = {f:.15}, {t:?}"),
    )
}

fn c2() -> Outcome {
    let m = build_parallel_optimal().unwrap();
    let (f, t) = timed(|| exact(&m, Pairing::Parallel, Prior::Tetrahedron));
    outcome(
        (f - 5.0 / 6.0).abs() < 1e-9 && t < Duration::from_secs(1),
        format!("F = {f:.15}, {t:?}"),
    )
}

fn c3() -> Outcome {
    let m = build_antiparallel(default_alpha(), default_beta()).unwrap();
    let f = exact(&m, Pairing::Antiparallel, Prior::UniformSphere);
    let want = closed_forms().0;
    outcome(
        (f - want).abs() < 1e-9 && (f - 0.789).abs() < 1e-3,
        format!("F = {f:.15}, closed form {want:.15}"),
    )
}

fn c4() -> Outcome {
    let m = build_antiparallel(default_alpha(), default_beta()).unwrap();
    let f = exact(&m, Pairing::Antiparallel, Prior::Tetrahedron);
    let want = closed_forms().1;
    outcome(
        (f - want).abs() < 1e-9 && (f - 0.955).abs() < 1e-3,
        format!("F = {f:.15}, closed form {want:.15}"),
    )
}

fn c5() -> Outcome {
    let par = build_parallel_optimal().unwrap();
    let anti = build_antiparallel(default_alpha(), default_beta()).unwrap();
    let uni = exact(&anti, Pairing::Antiparallel, Prior::UniformSphere)
        - exact(&par, Pairing::Parallel, Prior::UniformSphere);
    let tet = exact(&anti, Pairing::Antiparallel, Prior::Tetrahedron)
        - exact(&par, Pairing::Parallel, Prior::Tetrahedron);
    outcome(
        uni >= 0.038 && tet >= 0.12,
        format!("margins {uni:.6} (uniform), {tet:.6} (tetrahedron)"),
    )
}

fn c6() -> Outcome {
    let par = build_parallel_optimal().unwrap().validate();
    let anti = build_antiparallel(default_alpha(), default_beta())
        .unwrap()
        .validate();
    let residual = [
        par.orthonormality,
        par.completeness,
        anti.orthonormality,
        anti.completeness,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let (alpha, beta) = antiparallel_coefficients_from_gram(&gram_matrix(&antiparallel_states(
        &fix_phases_antiparallel().unwrap(),
    )));
    let d = 6.0 * 6f64.sqrt() - 2.0 * 2f64.sqrt();
    let (a_ref, b_ref) = (13.0 / d, (5.0 - 2.0 * 3f64.sqrt()) / d);
    let coeff = (alpha - a_ref).abs().max((beta - b_ref).abs());
    outcome(
        residual < 1e-10 && coeff < 1e-10,
        format!("max basis residual {residual:.1e}, alpha/beta gap {coeff:.1e}"),
    )
}

fn c7() -> Outcome {
    let ((par, anti), t) = timed(|| {
        let run = |p| {
            optimize(
                &Scenario::new(p, Prior::UniformSphere),
                &OptimizerConfig::new(Constraint::Full, 20, SEED),
            )
            .unwrap()
        };
        (
            run(Pairing::Parallel).best_fidelity,
            run(Pairing::Antiparallel).best_fidelity,
        )
    });
    let pass = (par - 0.75).abs() < 1e-3
        && (anti - closed_forms().0).abs() < 1e-3
        && t < Duration::from_secs(300);
    outcome(
        pass,
        format!("parallel {par:.9}, anti-parallel {anti:.9}, {t:?}"),
    )
}

fn c8() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let basis = product_basis(&random_unitary(&mut r), &random_unitary(&mut r));
        let guesses = core::array::from_fn(|_| r.direction());
        let m = ProjectiveMeasurement::new(basis, guesses, "product").unwrap();
        let e = passive_flip_equivalence_product(&m, &Prior::UniformSphere).unwrap();
        worst = worst.max((e.parallel - e.antiparallel_flipped).abs());
    }
    let s = Scenario::new(Pairing::Antiparallel, Prior::UniformSphere);
    let full = optimize(&s, &OptimizerConfig::new(Constraint::Full, 20, SEED))
        .unwrap()
        .best_fidelity;
    let product = optimize(&s, &OptimizerConfig::new(Constraint::Product, 20, SEED))
        .unwrap()
        .best_fidelity;
    let gap = full - product;
    outcome(
        worst <= 1e-12 && gap > 0.0,
        format!("equality residual {worst:.1e}, gap {gap:.6} (product {product:.9})"),
    )
}

fn c9() -> Outcome {
    let s = uqsf_average_fidelity(100_000, SEED, AxisMode::Random).unwrap();
    let mc = (s.mean - 2.0 / 3.0).abs() <= 4.0 * s.std_error;
    let mut r = rng(9);
    let (mut fid, mut contraction) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = r.direction();
        let out = uqsf_channel(&bloch_to_spinor(&n, 0.0).density());
        fid = fid.max((flip_fidelity(&n, &out) - 2.0 / 3.0).abs());
        // Output Bloch vector should be -n/3.
        let v = out.bloch_vector();
        let nv = n.to_array();
        contraction = contraction.max(
            (0..3)
                .map(|k| (v[k] + nv[k] / 3.0).abs())
                .fold(0.0, f64::max),
        );
    }
    let multi = uqsf_multicopy_average(10, 100_000, SEED, AxisMode::Random).unwrap();
    let spread = multi
        .per_copy
        .iter()
        .map(|c| (c.mean - s.mean).abs())
        .fold(0.0, f64::max);
    let pass = mc && fid < 1e-12 && contraction < 1e-12 && spread < 1e-12;
    outcome(pass, format!("MC {:.6} +- {:.1e}, channel {fid:.1e}, contraction {contraction:.1e}, copy spread {spread:.1e}", s.mean, s.std_error))
}

fn c10() -> Outcome {
    let grid = unitary_flip_grid(1);
    let ceiling = best_unitary_flip_fidelity(10, SEED).unwrap().fidelity;
    let pass = (grid.best - ceiling).abs() < 1e-4 && (ceiling - 2.0 / 3.0).abs() < 1e-6;
    outcome(
        pass,
        format!(
            "optimizer {ceiling:.12}, grid {:.12} over {} points",
            grid.best, grid.points
        ),
    )
}

fn c11() -> Outcome {
    let defects = flipped_projector_defects(&build_parallel_optimal().unwrap());
    let projectors = defects
        .iter()
        .all(|d| d.min_eigenvalue < -1e-6 && d.idempotency > 0.1);
    let s = negativity(pure_density(&singlet()).matrix()).unwrap();
    let d = defects[0];
    outcome(
        projectors && (s + 0.5).abs() < 1e-10,
        format!(
            "flipped min eigenvalue {:.6}, ||M^2-M|| {:.6}, singlet {s:.12}",
            d.min_eigenvalue, d.idempotency
        ),
    )
}

fn c12() -> Outcome {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (n, m) = (r.direction(), r.direction());
        let (p, a) = pair_overlaps(&n, &m);
        let want = ((1.0 + n.dot(&m)) / 2.0).powi(2);
        worst = worst.max((p - a).abs()).max((p - want).abs());
    }
    let ranks: Vec<(usize, usize)> = (0..50)
        .map(|k| {
            let s = SEED + k;
            (
                span_rank(Pairing::Parallel, 20, s).unwrap().rank,
                span_rank(Pairing::Antiparallel, 20, s).unwrap().rank,
            )
        })
        .collect();
    let good = ranks.iter().filter(|&&r| r == (3, 4)).count();
    outcome(
        worst < 1e-12 && good == 50,
        format!("pair residual {worst:.1e}, ranks (3, 4) on {good}/50 seeds"),
    )
}

fn c13() -> Outcome {
    let mut r = rng(13);
    let mut refl = 0.0f64;
    let mut matched = None;
    let vec3 = |r: &mut TrialRng| {
        [
            r.uniform_in(-1.0, 1.0),
            r.uniform_in(-1.0, 1.0),
            r.uniform_in(-1.0, 1.0),
        ]
    };
    for _ in 0..100 {
        let (a0, b0) = (r.uniform_in(-1.0, 1.0), r.uniform_in(-1.0, 1.0));
        let (a, b) = (vec3(&mut r), vec3(&mut r));
        let check = reflection_identity_check(a0, &a, b0, &b);
        refl = refl.max(check.residual);
        matched = Some(check.matched);
    }
    let mut mirror = 0.0f64;
    for _ in 0..100 {
        let a = bloch_to_spinor(&r.direction(), r.uniform_in(-3.0, 3.0));
        let b = bloch_to_spinor(&r.direction(), r.uniform_in(-3.0, 3.0));
        let out = mirror_plus_rotation_flip(&tensor(&a, &b)).output;
        mirror =
            mirror.max(out.max_abs_diff(pure_density(&tensor(&a, &antiunitary_flip(&b))).matrix()));
    }
    let singlet_min = mirror_plus_rotation_flip(&singlet()).eigenvalues[0];
    let matched = matched.unwrap();
    let pass = refl < 1e-12 && matched == PauliAxis::Y && mirror < 1e-12 && singlet_min < 0.0;
    outcome(
        pass,
        format!("reflection {refl:.1e} (sigma_{}), products {mirror:.1e}, singlet min eigenvalue {singlet_min:.6}", matched.name()),
    )
}

fn c14() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_dirq"))
            .args(["verify", "--seed", "3", "--json"])
            .arg(&path)
            .env_remove("DIRQ_SEED")
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read(&path).unwrap_or_default())
    };
    let (code_a, a) = run("a.json");
    let (code_b, b) = run("b.json");
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap_or_default();
    let mut criteria: Vec<u64> = report["entries"]
        .as_array()
        .map(|es| es.iter().filter_map(|e| e["criterion"].as_u64()).collect())
        .unwrap_or_default();
    criteria.dedup();
    let covered = (1..=13).all(|c| criteria.contains(&c));
    let pass = code_a == Some(0) && code_b == Some(0) && !a.is_empty() && a == b && covered;
    outcome(
        pass,
        format!(
            "exit {code_a:?}/{code_b:?}, {} bytes, identical {}, criteria 1-13 covered {covered}",
            a.len(),
            a == b
        ),
    )
}

fn main() {
    let criteria: [(u8, &str, Check); 14] = [
        (1, "parallel pairs, uniform prior", c1),
        (2, "parallel pairs, tetrahedron prior", c2),
        (3, "anti-parallel pairs, uniform prior", c3),
        (4, "anti-parallel pairs, tetrahedron prior", c4),
        (5, "anti-parallel advantage", c5),
        (6, "phase fixing", c6),
        (7, "optimizer rediscovery", c7),
        (8, "product measurements", c8),
        (9, "universal spin flip", c9),
        (10, "unitary ceiling", c10),
        (11, "flipped projectors and singlet", c11),
        (12, "pair distances and spans", c12),
        (13, "reflection and mirror flip", c13),
        (14, "verify command", c14),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let o = check();
        failed += !o.pass as u32;
        println!(
            "{} criterion {n:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of 14 criteria pass", 14 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
