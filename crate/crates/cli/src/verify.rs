//! The verification report: every headline number recomputed and compared
//! against its reference value.

use std::fmt::Write as _;

use dirq_core::estimation::{fidelity_exact, FidelityMethod, Pairing, Prior, Scenario};
use dirq_core::flip::{
    antiunitary_flip, best_unitary_flip_fidelity, flip_fidelity, uqsf_channel,
    uqsf_multicopy_average, AxisMode,
};
use dirq_core::hilbert::{
    bloch_to_spinor, expm_i_hermitian, hermitian_from_params, pure_density, singlet, tensor, Mat2,
};
use dirq_core::measurement::{
    antiparallel_coefficients_from_gram, antiparallel_states, build_antiparallel,
    build_parallel_optimal, default_alpha, default_beta, fix_phases_antiparallel, gram_matrix,
    ProjectiveMeasurement,
};
use dirq_core::optimizer::{Constraint, OptimizerConfig};
use dirq_core::rng::{domain, TrialRng};
use dirq_core::statespace::{pair_overlaps, span_rank};
use dirq_core::transpose::{
    flipped_projector_defects, mirror_plus_rotation_flip, negativity,
    passive_flip_equivalence_product, product_basis, reflection_identity_check,
};
use serde::Serialize;

use crate::error::CliError;
use crate::{oracle, parallel};

pub const PARALLEL_UNIFORM: f64 = 0.75;
pub const PARALLEL_TETRAHEDRON: f64 = 5.0 / 6.0;

/// `(5 sqrt 3 + 33) / (3 (3 sqrt 3 - 1)^2)`.
pub fn antiparallel_uniform() -> f64 {
    let r3 = 3f64.sqrt();
    (5.0 * r3 + 33.0) / (3.0 * (3.0 * r3 - 1.0).powi(2))
}

/// `(2 sqrt 3 + 47) / (3 (3 sqrt 3 - 1)^2)`.
pub fn antiparallel_tetrahedron() -> f64 {
    let r3 = 3f64.sqrt();
    (2.0 * r3 + 47.0) / (3.0 * (3.0 * r3 - 1.0).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed - expected| <= tolerance`.
    Within,
    AtLeast,
    AtMost,
    GreaterThan,
    LessThan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub criterion: u8,
    pub claim: String,
    pub comparison: Comparison,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Entry {
    fn evaluate(&mut self) {
        let (c, e) = (self.computed, self.expected);
        self.pass = match self.comparison {
            Comparison::Within => (c - e).abs() <= self.tolerance,
            Comparison::AtLeast => c >= e,
            Comparison::AtMost => c <= e,
            Comparison::GreaterThan => c > e,
            Comparison::LessThan => c < e,
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub seed: u64,
    pub trials: u64,
    pub starts: usize,
    pub pass: bool,
    pub entries: Vec<Entry>,
}

impl VerifyReport {
    pub fn entry(&self, claim: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.claim == claim)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Monte-Carlo trials per stochastic entry; 0 skips those entries.
    pub trials: u64,
    pub starts: usize,
    /// Grid resolution of the unitary-flip oracle, in degrees.
    pub grid_step_deg: u32,
    /// Test hook: shifts the reference value of this claim.
    pub corrupt_claim: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            trials: 100_000,
            starts: 20,
            grid_step_deg: 1,
            corrupt_claim: None,
        }
    }
}

struct Builder {
    entries: Vec<Entry>,
}

impl Builder {
    fn push(
        &mut self,
        criterion: u8,
        claim: &str,
        comparison: Comparison,
        expected: f64,
        computed: f64,
        tolerance: f64,
    ) -> &mut Entry {
        self.entries.push(Entry {
            criterion,
            claim: claim.to_string(),
            comparison,
            expected,
            computed,
            tolerance,
            pass: false,
            detail: None,
        });
        self.entries.last_mut().expect("just pushed")
    }

    fn within(
        &mut self,
        criterion: u8,
        claim: &str,
        expected: f64,
        computed: f64,
        tolerance: f64,
    ) -> &mut Entry {
        self.push(
            criterion,
            claim,
            Comparison::Within,
            expected,
            computed,
            tolerance,
        )
    }

    fn at_most(&mut self, criterion: u8, claim: &str, bound: f64, computed: f64) -> &mut Entry {
        self.push(criterion, claim, Comparison::AtMost, bound, computed, 0.0)
    }
}

/// Draws for verification item `tag`, sample `i`.
fn rng(seed: u64, tag: u64, i: u64) -> TrialRng {
    TrialRng::new(seed, domain::VERIFY, (tag << 32) | i)
}

fn random_unitary(rng: &mut TrialRng) -> Mat2 {
    let p: Vec<f64> = (0..4).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
    expm_i_hermitian(&hermitian_from_params::<2>(&p)).expect("Hermitian generator")
}

fn random_vector(rng: &mut TrialRng) -> [f64; 3] {
    [
        rng.uniform_in(-1.0, 1.0),
        rng.uniform_in(-1.0, 1.0),
        rng.uniform_in(-1.0, 1.0),
    ]
}

fn mc_std_error(method: FidelityMethod) -> f64 {
    match method {
        FidelityMethod::MonteCarlo { std_error, .. } => std_error,
        FidelityMethod::Exact => 0.0,
    }
}

/// Measurements and reference values of the four headline scenarios.
pub struct Headline {
    pub pairing: Pairing,
    pub prior: Prior,
    pub measurement: ProjectiveMeasurement,
    pub reference: f64,
    pub claim: &'static str,
    pub criterion: u8,
}

pub fn headline_scenarios() -> Result<Vec<Headline>, CliError> {
    let par = build_parallel_optimal()?;
    let anti = build_antiparallel(default_alpha(), default_beta())?;
    Ok(vec![
        Headline {
            pairing: Pairing::Parallel,
            prior: Prior::UniformSphere,
            measurement: par.clone(),
            reference: PARALLEL_UNIFORM,
            claim: "parallel-uniform",
            criterion: 1,
        },
        Headline {
            pairing: Pairing::Parallel,
            prior: Prior::Tetrahedron,
            measurement: par,
            reference: PARALLEL_TETRAHEDRON,
            claim: "parallel-tetrahedron",
            criterion: 2,
        },
        Headline {
            pairing: Pairing::Antiparallel,
            prior: Prior::UniformSphere,
            measurement: anti.clone(),
            reference: antiparallel_uniform(),
            claim: "antiparallel-uniform",
            criterion: 3,
        },
        Headline {
            pairing: Pairing::Antiparallel,
            prior: Prior::Tetrahedron,
            measurement: anti,
            reference: antiparallel_tetrahedron(),
            claim: "antiparallel-tetrahedron",
            criterion: 4,
        },
    ])
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let mut b = Builder {
        entries: Vec::new(),
    };
    let seed = opts.seed;

    // Headline fidelities.
    let headline = headline_scenarios()?;
    let mut exact = Vec::new();
    for h in &headline {
        let scenario = Scenario::new(h.pairing, h.prior.clone());
        let value = fidelity_exact(&h.measurement, &scenario).value;
        exact.push(value);
        b.within(h.criterion, h.claim, h.reference, value, 1e-9);
        if h.pairing == Pairing::Antiparallel {
            let rounded = if h.prior == Prior::UniformSphere {
                0.789
            } else {
                0.955
            };
            b.within(
                h.criterion,
                &format!("{}-decimal", h.claim),
                rounded,
                value,
                1e-3,
            );
        }
        if opts.trials > 0 {
            let mc = parallel::fidelity_monte_carlo(&h.measurement, &scenario, opts.trials, seed)?;
            let se = mc_std_error(mc.method);
            b.within(
                h.criterion,
                &format!("{}-monte-carlo", h.claim),
                h.reference,
                mc.value,
                4.0 * se,
            )
            .detail = Some(format!("{} trials, std_error {se:e}", opts.trials));
        }
    }
    b.push(
        5,
        "margin-uniform",
        Comparison::AtLeast,
        0.038,
        exact[2] - exact[0],
        0.0,
    );
    b.push(
        5,
        "margin-tetrahedron",
        Comparison::AtLeast,
        0.12,
        exact[3] - exact[1],
        0.0,
    );

    // Phase fixing.
    let par = &headline[0].measurement;
    let anti = &headline[2].measurement;
    for (name, m) in [("parallel", par), ("antiparallel", anti)] {
        let v = m.validate();
        b.at_most(
            6,
            &format!("phases-{name}-orthonormality"),
            1e-10,
            v.orthonormality,
        );
        b.at_most(
            6,
            &format!("phases-{name}-completeness"),
            1e-10,
            v.completeness,
        );
    }
    let gram = gram_matrix(&antiparallel_states(&fix_phases_antiparallel()?));
    let (alpha, beta) = antiparallel_coefficients_from_gram(&gram);
    b.within(6, "alpha-from-gram", default_alpha(), alpha, 1e-10);
    b.within(6, "beta-from-gram", default_beta(), beta, 1e-10);

    // Optimizer.
    let uniform_par = Scenario::new(Pairing::Parallel, Prior::UniformSphere);
    let uniform_anti = Scenario::new(Pairing::Antiparallel, Prior::UniformSphere);
    let full = |s: &Scenario| {
        parallel::optimize(
            s,
            &OptimizerConfig::new(Constraint::Full, opts.starts, seed),
        )
    };
    let opt_par = full(&uniform_par)?;
    let opt_anti = full(&uniform_anti)?;
    b.within(
        7,
        "optimizer-parallel-uniform",
        PARALLEL_UNIFORM,
        opt_par.best_fidelity,
        1e-3,
    )
    .detail = Some(format!("{} starts", opts.starts));
    b.within(
        7,
        "optimizer-antiparallel-uniform",
        antiparallel_uniform(),
        opt_anti.best_fidelity,
        1e-3,
    )
    .detail = Some(format!("{} starts", opts.starts));

    // Passive flip on product measurements.
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut r = rng(seed, 1, i);
        let basis = product_basis(&random_unitary(&mut r), &random_unitary(&mut r));
        let guesses = core::array::from_fn(|_| r.direction());
        let m = ProjectiveMeasurement::new(basis, guesses, "random-product")?;
        for prior in [Prior::UniformSphere, Prior::Tetrahedron] {
            let e = passive_flip_equivalence_product(&m, &prior)?;
            worst = worst.max((e.parallel - e.antiparallel_flipped).abs());
        }
    }
    b.at_most(8, "passive-flip-product-equality", 1e-12, worst)
        .detail = Some("100 random product bases".into());
    let product = parallel::optimize(
        &uniform_anti,
        &OptimizerConfig::new(Constraint::Product, opts.starts, seed),
    )?
    .best_fidelity;
    b.push(
        8,
        "entangled-minus-product-gap",
        Comparison::GreaterThan,
        0.0,
        opt_anti.best_fidelity - product,
        0.0,
    )
    .detail = Some(format!("product optimum {product}"));

    // Universal spin flip.
    if opts.trials > 0 {
        let s = parallel::uqsf_average_fidelity(opts.trials, seed, AxisMode::Random)?;
        b.within(9, "uqsf-monte-carlo", 2.0 / 3.0, s.mean, 4.0 * s.std_error)
            .detail = Some(format!("{} trials, std_error {:e}", s.trials, s.std_error));
        let multi = uqsf_multicopy_average(10, opts.trials, seed, AxisMode::Random)?;
        let spread = multi
            .per_copy
            .iter()
            .map(|c| (c.mean - s.mean).abs())
            .fold(0.0, f64::max);
        b.at_most(9, "uqsf-copies-no-extra-cost", 1e-12, spread)
            .detail = Some("10 copies from one measurement vs the single-copy mean".into());
    }
    let (mut fid_gap, mut worst_factor, mut worst_gap) = (0.0f64, -1.0 / 3.0, 0.0f64);
    for i in 0..100 {
        let n = rng(seed, 2, i).direction();
        let out = uqsf_channel(&bloch_to_spinor(&n, 0.0).density());
        fid_gap = fid_gap.max((flip_fidelity(&n, &out) - 2.0 / 3.0).abs());
        let factor = n.dot_vector(&out.bloch_vector());
        if (factor + 1.0 / 3.0).abs() > worst_gap {
            worst_gap = (factor + 1.0 / 3.0).abs();
            worst_factor = factor;
        }
    }
    b.at_most(9, "uqsf-channel-fidelity", 1e-12, fid_gap).detail =
        Some("max |F - 2/3| over 100 inputs".into());
    b.within(9, "uqsf-bloch-contraction", -1.0 / 3.0, worst_factor, 1e-12);

    // Unitary ceiling.
    let grid = oracle::unitary_flip_grid(opts.grid_step_deg);
    let ceiling = best_unitary_flip_fidelity(10, seed)?;
    b.at_most(
        10,
        "unitary-grid-closed-form-gap",
        1e-12,
        grid.max_closed_form_gap,
    );
    b.within(10, "unitary-grid-oracle", grid.best, ceiling.fidelity, 1e-4)
        .detail = Some(format!(
        "{} grid points at {} degree steps",
        grid.points, opts.grid_step_deg
    ));
    b.within(10, "unitary-ceiling", 2.0 / 3.0, ceiling.fidelity, 1e-6);

    // Negativity.
    for (j, d) in flipped_projector_defects(par).iter().enumerate() {
        b.push(
            11,
            &format!("flipped-projector-{j}-min-eigenvalue"),
            Comparison::LessThan,
            -1e-6,
            d.min_eigenvalue,
            0.0,
        );
        b.push(
            11,
            &format!("flipped-projector-{j}-idempotency"),
            Comparison::GreaterThan,
            0.1,
            d.idempotency,
            0.0,
        );
    }
    b.within(
        11,
        "singlet-pt-min-eigenvalue",
        -0.5,
        negativity(pure_density(&singlet()).matrix())?,
        1e-10,
    );

    // Span structure.
    let mut eq8 = 0.0f64;
    for i in 0..1000 {
        let mut r = rng(seed, 3, i);
        let (n, m) = (r.direction(), r.direction());
        let (p, a) = pair_overlaps(&n, &m);
        eq8 = eq8.max((p - a).abs());
    }
    b.at_most(12, "pair-distance-equality", 1e-12, eq8).detail = Some("1000 random pairs".into());
    let (mut rank3, mut rank4) = (0u32, 0u32);
    for k in 0..50 {
        let s = seed.wrapping_add(k);
        rank3 += (span_rank(Pairing::Parallel, 20, s)?.rank == 3) as u32;
        rank4 += (span_rank(Pairing::Antiparallel, 20, s)?.rank == 4) as u32;
    }
    b.within(12, "span-rank-parallel-3", 50.0, rank3 as f64, 0.0)
        .detail = Some("seeds with rank 3 out of 50".into());
    b.within(12, "span-rank-antiparallel-4", 50.0, rank4 as f64, 0.0)
        .detail = Some("seeds with rank 4 out of 50".into());

    // Reflection identity and mirror-plus-rotation.
    let mut refl = 0.0f64;
    let mut matched = None;
    for i in 0..100 {
        let mut r = rng(seed, 4, i);
        let (a0, b0) = (r.uniform_in(-1.0, 1.0), r.uniform_in(-1.0, 1.0));
        let (a, bv) = (random_vector(&mut r), random_vector(&mut r));
        let check = reflection_identity_check(a0, &a, b0, &bv);
        refl = refl.max(check.residual);
        matched = Some(check.matched);
    }
    let matched = matched.expect("100 checks");
    let pole = reflection_identity_check(1.0, &[0.0; 3], 0.0, &[0.0, 0.0, 1.0]);
    b.at_most(13, "reflection-identity", 1e-12, refl).detail = Some(format!(
        "negated component sigma_{}; the sigma_z form leaves residual {} at b = (0,0,1)",
        matched.name(),
        pole.z_form_residual
    ));
    b.within(
        13,
        "reflection-matched-axis",
        1.0,
        matched.index() as f64,
        0.0,
    )
    .detail = Some(format!(
        "axis index {} = {}",
        matched.index(),
        matched.name()
    ));
    let mut mirror = 0.0f64;
    for i in 0..100 {
        let mut r = rng(seed, 5, i);
        let a = bloch_to_spinor(&r.direction(), r.uniform_in(-3.0, 3.0));
        let bs = bloch_to_spinor(&r.direction(), r.uniform_in(-3.0, 3.0));
        let out = mirror_plus_rotation_flip(&tensor(&a, &bs));
        let want = pure_density(&tensor(&a, &antiunitary_flip(&bs)));
        mirror = mirror.max(out.output.max_abs_diff(want.matrix()));
    }
    b.at_most(13, "mirror-rotation-product", 1e-12, mirror);
    b.push(
        13,
        "mirror-rotation-singlet-min-eigenvalue",
        Comparison::LessThan,
        0.0,
        mirror_plus_rotation_flip(&singlet()).eigenvalues[0],
        0.0,
    );

    if let Some(claim) = &opts.corrupt_claim {
        let e = b
            .entries
            .iter_mut()
            .find(|e| &e.claim == claim)
            .ok_or_else(|| CliError::Usage(format!("unknown claim {claim:?}")))?;
        e.expected += 1.0;
    }
    for e in &mut b.entries {
        e.evaluate();
    }
    let pass = b.entries.iter().all(|e| e.pass);
    Ok(VerifyReport {
        tool: "dirq",
        version: env!("CARGO_PKG_VERSION"),
        core_version: dirq_core::VERSION,
        seed,
        trials: opts.trials,
        starts: opts.starts,
        pass,
        entries: b.entries,
    })
}

/// The reference comparison table followed by one line per entry.
pub fn render(report: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:<12} {:>12} {:>12} {:>22}",
        "pairing", "prior", "exact", "reference", "monte carlo"
    );
    for (pairing, prior, claim) in [
        ("parallel", "uniform", "parallel-uniform"),
        ("parallel", "tetrahedron", "parallel-tetrahedron"),
        ("antiparallel", "uniform", "antiparallel-uniform"),
        ("antiparallel", "tetrahedron", "antiparallel-tetrahedron"),
    ] {
        let Some(e) = report.entry(claim) else {
            continue;
        };
        let mc = match report.entry(&format!("{claim}-monte-carlo")) {
            Some(m) => format!("{:.6} +- {:.6}", m.computed, m.tolerance / 4.0),
            None => "skipped".to_string(),
        };
        let _ = writeln!(
            out,
            "{pairing:<14} {prior:<12} {:>12.9} {:>12.9} {mc:>22}",
            e.computed, e.expected
        );
    }
    let _ = writeln!(out);
    for e in &report.entries {
        let status = if e.pass { "PASS" } else { "FAIL" };
        let relation = match e.comparison {
            Comparison::Within => {
                format!("within {} of {}", number(e.tolerance), number(e.expected))
            }
            Comparison::AtLeast => format!(">= {}", number(e.expected)),
            Comparison::AtMost => format!("<= {}", number(e.expected)),
            Comparison::GreaterThan => format!("> {}", number(e.expected)),
            Comparison::LessThan => format!("< {}", number(e.expected)),
        };
        let _ = writeln!(
            out,
            "{status} [{:>2}] {:<40} {:<24} {relation}",
            e.criterion,
            e.claim,
            number(e.computed)
        );
    }
    let _ = writeln!(
        out,
        "\noverall: {}",
        if report.pass { "PASS" } else { "FAIL" }
    );
    out
}

fn number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x}")
    }
}
