//! Command-line definitions and the subcommand drivers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirq_core::estimation::{fidelity_exact, FidelityMethod, Pairing, Prior, Scenario};
use dirq_core::flip::{uqsf_multicopy_average, uqsf_trial, AxisMode, FlipSummary};
use dirq_core::hilbert::{hermitian_eigen, pure_density, spinor_to_bloch, Mat4};
use dirq_core::measurement::{
    build_antiparallel, build_parallel_optimal, default_alpha, default_beta, ProjectiveMeasurement,
};
use dirq_core::optimizer::{Constraint, OptimizerConfig};
use dirq_core::stats;
use dirq_core::transpose::{
    negativity, partial_transpose, passive_flip, pauli_decompose, projector_defect,
    schmidt_coefficients, PauliDecomposition, Subsystem,
};
use dirq_core::Direction;
use serde::Serialize;

use crate::error::{exit, CliError};
use crate::files::{
    read_json, to_json, write_json, MeasurementFile, PptInput, PriorFile, SpinorFile,
};
use crate::{parallel, verify};

#[derive(Debug, Parser)]
#[command(
    name = "dirq",
    version,
    about = "Direction encoding with parallel and anti-parallel spin pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute every reference number and compare.
    Verify(VerifyArgs),
    /// Average fidelity of a measurement.
    Fidelity(FidelityArgs),
    /// Multi-start search for the best measurement.
    Optimize(OptimizeArgs),
    /// Simulate the measure-and-prepare spin flip.
    Flip(FlipArgs),
    /// Pauli decomposition and partial-transpose spectra.
    Ppt(PptArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Random seed.
    #[arg(long, env = "DIRQ_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Write the JSON report here; `-` prints it instead of the summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Monte-Carlo trials per stochastic entry; 0 skips them.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Optimizer starts.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub starts: u64,
    #[arg(long, hide = true)]
    pub corrupt_claim: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    ParallelOptimal,
    Antiparallel,
}

impl Preset {
    pub fn build(self) -> Result<ProjectiveMeasurement, CliError> {
        Ok(match self {
            Preset::ParallelOptimal => build_parallel_optimal()?,
            Preset::Antiparallel => build_antiparallel(default_alpha(), default_beta())?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    Parallel,
    Antiparallel,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Parallel => Pairing::Parallel,
            PairingArg::Antiparallel => Pairing::Antiparallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Uniform,
    Tetrahedron,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub pairing: PairingArg,
    #[arg(
        long,
        value_enum,
        default_value = "uniform",
        conflicts_with = "prior_file"
    )]
    pub prior: PriorArg,
    /// Discrete prior: `{"points": [{"direction": [x, y, z], "weight": w}]}`.
    #[arg(long)]
    pub prior_file: Option<PathBuf>,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario, CliError> {
        let prior = match (&self.prior_file, self.prior) {
            (Some(path), _) => Prior::Discrete(read_json::<PriorFile>(path)?.to_prior()?),
            (None, PriorArg::Uniform) => Prior::UniformSphere,
            (None, PriorArg::Tetrahedron) => Prior::Tetrahedron,
        };
        Ok(Scenario::new(self.pairing.into(), prior))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Measurement file.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub measurement: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    Full,
    Product,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub starts: u64,
    #[arg(long, value_enum, default_value = "full")]
    pub constraint: ConstraintArg,
    /// Write the best measurement here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlipArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Flipped copies prepared from each measurement.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub copies: u64,
    /// Fixed measurement axis `x,y,z` (normalized); random when absent.
    #[arg(long)]
    pub axis: Option<String>,
    /// Spinor file `[[re, im], [re, im]]` used as the input for every trial
    /// instead of uniformly random inputs.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PptArgs {
    #[command(flatten)]
    pub common: Common,
    /// State `{"state": [...]}` or measurement file.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::SCHEMA
            } else {
                exit::OK
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Fidelity(a) => cmd_fidelity(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Flip(a) => cmd_flip(a),
        Command::Ppt(a) => cmd_ppt(a),
    }
}

/// Prints `summary`, or the JSON when `--json -`, and writes the JSON file.
fn emit<T: Serialize>(common: &Common, report: &T, summary: &str) -> Result<(), CliError> {
    match common.json.as_deref() {
        Some(p) if p == Path::new("-") => print!("{}", to_json(report)),
        Some(p) => {
            write_json(p, report)?;
            print!("{summary}");
        }
        None => print!("{summary}"),
    }
    Ok(())
}

fn load_measurement(
    file: Option<&Path>,
    preset: Option<Preset>,
) -> Result<ProjectiveMeasurement, CliError> {
    match (file, preset) {
        (_, Some(p)) => p.build(),
        (Some(path), None) => validated(&read_json::<MeasurementFile>(path)?),
        (None, None) => Err(CliError::Usage(
            "a measurement file or --preset is required".into(),
        )),
    }
}

/// Converts a file, printing the residuals when validation fails.
fn validated(f: &MeasurementFile) -> Result<ProjectiveMeasurement, CliError> {
    let m = f.to_measurement();
    if let Err(CliError::Semantic(dirq_core::Error::InvalidMeasurement {
        orthonormality,
        completeness,
    })) = &m
    {
        eprintln!("orthonormality residual {orthonormality:e}");
        eprintln!("completeness residual {completeness:e}");
    }
    m
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, CliError> {
    let opts = verify::VerifyOptions {
        seed: a.common.seed,
        trials: a.trials,
        starts: a.starts as usize,
        corrupt_claim: a.corrupt_claim,
        ..Default::default()
    };
    let report = verify::run(&opts)?;
    emit(&a.common, &report, &verify::render(&report))?;
    for e in report.failures() {
        eprintln!("failed: {} (criterion {})", e.claim, e.criterion);
    }
    Ok(if report.pass {
        exit::OK
    } else {
        exit::VERIFY_FAILED
    })
}

#[derive(Debug, Serialize)]
pub struct FidelityOutput {
    pub measurement: String,
    pub pairing: &'static str,
    pub prior: &'static str,
    pub method: &'static str,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn cmd_fidelity(a: FidelityArgs) -> Result<i32, CliError> {
    let m = load_measurement(a.measurement.as_deref(), a.preset)?;
    let scenario = a.scenario.scenario()?;
    let report = match a.method {
        MethodArg::Exact => fidelity_exact(&m, &scenario),
        MethodArg::MonteCarlo => {
            parallel::fidelity_monte_carlo(&m, &scenario, a.trials, a.common.seed)?
        }
    };
    let (method, trials, std_error, seed) = match report.method {
        FidelityMethod::Exact => ("exact", None, None, None),
        FidelityMethod::MonteCarlo { trials, std_error } => (
            "monte-carlo",
            Some(trials),
            Some(std_error),
            Some(a.common.seed),
        ),
    };
    let out = FidelityOutput {
        measurement: m.label().to_string(),
        pairing: scenario.pairing.name(),
        prior: scenario.prior.name(),
        method,
        value: report.value,
        trials,
        std_error,
        seed,
    };
    let mut summary = format!(
        "{} on {} pairs, {} prior: F = {:.12}",
        out.measurement, out.pairing, out.prior, out.value
    );
    if let Some(se) = std_error {
        let _ = write!(summary, " +- {se:.2e}");
    }
    summary.push('\n');
    emit(&a.common, &out, &summary)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
pub struct StartOutput {
    pub index: usize,
    pub fidelity: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct OptimizeOutput {
    pub pairing: &'static str,
    pub prior: &'static str,
    pub constraint: &'static str,
    pub seed: u64,
    pub best_fidelity: f64,
    pub best_start: usize,
    pub starts: Vec<StartOutput>,
    pub best_measurement: MeasurementFile,
}

fn cmd_optimize(a: OptimizeArgs) -> Result<i32, CliError> {
    let scenario = a.scenario.scenario()?;
    let constraint = match a.constraint {
        ConstraintArg::Full => Constraint::Full,
        ConstraintArg::Product => Constraint::Product,
    };
    let cfg = OptimizerConfig::new(constraint, a.starts as usize, a.common.seed);
    let result = parallel::optimize(&scenario, &cfg)?;
    let best = MeasurementFile::from_measurement(&result.best_measurement);
    if let Some(path) = &a.output {
        write_json(path, &best)?;
    }
    let out = OptimizeOutput {
        pairing: scenario.pairing.name(),
        prior: scenario.prior.name(),
        constraint: constraint.name(),
        seed: a.common.seed,
        best_fidelity: result.best_fidelity,
        best_start: result.best_start,
        starts: result
            .starts
            .iter()
            .map(|s| StartOutput {
                index: s.index,
                fidelity: s.fidelity,
                evaluations: s.evaluations,
                iterations: s.iterations,
                converged: s.converged,
            })
            .collect(),
        best_measurement: best,
    };
    let converged = out.starts.iter().filter(|s| s.converged).count();
    let summary = format!(
        "{} search, {} pairs, {} prior: best F = {:.12} (start {}, {converged}/{} converged)\n",
        out.constraint,
        out.pairing,
        out.prior,
        out.best_fidelity,
        out.best_start,
        out.starts.len()
    );
    emit(&a.common, &out, &summary)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
pub struct SummaryOutput {
    pub mean: f64,
    pub std_error: f64,
}

impl From<&FlipSummary> for SummaryOutput {
    fn from(s: &FlipSummary) -> Self {
        SummaryOutput {
            mean: s.mean,
            std_error: s.std_error,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FlipOutput {
    pub trials: u64,
    pub copies: u64,
    pub seed: u64,
    /// `null` for a random axis per trial.
    pub axis: Option<[f64; 3]>,
    /// `null` for uniformly random inputs.
    pub input: Option<[f64; 3]>,
    pub mean: f64,
    pub std_error: f64,
    pub per_copy: Vec<SummaryOutput>,
}

fn parse_axis(text: &str) -> Result<Direction, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--axis {text:?}: {e}")))?;
    let v: [f64; 3] = parts
        .try_into()
        .map_err(|_| CliError::Usage(format!("--axis {text:?}: expected x,y,z")))?;
    Direction::from_vector(v).map_err(|e| CliError::Usage(format!("--axis {text:?}: {e}")))
}

fn cmd_flip(a: FlipArgs) -> Result<i32, CliError> {
    let axis_dir = a.axis.as_deref().map(parse_axis).transpose()?;
    let axis = axis_dir.map_or(AxisMode::Random, AxisMode::Fixed);
    let seed = a.common.seed;
    let input = match &a.input {
        Some(path) => Some(spinor_to_bloch(
            &read_json::<SpinorFile>(path)?.to_spinor()?,
        )?),
        None => None,
    };
    let (single, per_copy): (FlipSummary, Vec<FlipSummary>) = match input {
        Some(n) => {
            let t = stats::tally_trials(a.trials, |i| uqsf_trial(&n, axis, seed, i).fidelity);
            let s = FlipSummary::from(t);
            // Every copy comes from the same outcome.
            (s, vec![s; a.copies as usize])
        }
        None if a.copies == 1 => {
            let s = parallel::uqsf_average_fidelity(a.trials, seed, axis)?;
            (s, vec![s])
        }
        None => {
            let multi = uqsf_multicopy_average(a.copies as usize, a.trials, seed, axis)?;
            (multi.per_copy[0], multi.per_copy)
        }
    };
    let out = FlipOutput {
        trials: a.trials,
        copies: a.copies,
        seed,
        axis: axis_dir.map(|d| d.to_array()),
        input: input.map(|d| d.to_array()),
        mean: single.mean,
        std_error: single.std_error,
        per_copy: per_copy.iter().map(SummaryOutput::from).collect(),
    };
    let mut summary = format!(
        "flip fidelity {:.6} +- {:.6} over {} trials\n",
        out.mean, out.std_error, out.trials
    );
    if a.copies > 1 {
        for (k, c) in out.per_copy.iter().enumerate() {
            let _ = writeln!(summary, "  copy {k}: {:.6} +- {:.6}", c.mean, c.std_error);
        }
    }
    emit(&a.common, &out, &summary)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
pub struct DecompositionOutput {
    pub scalar: f64,
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub correlations: [[f64; 3]; 3],
}

impl From<PauliDecomposition> for DecompositionOutput {
    fn from(d: PauliDecomposition) -> Self {
        DecompositionOutput {
            scalar: d.scalar,
            alpha: d.alpha,
            beta: d.beta,
            correlations: d.correlations,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OperatorOutput {
    pub decomposition: DecompositionOutput,
    /// Spectrum of the second-qubit partial transpose, ascending.
    pub partial_transpose_eigenvalues: [f64; 4],
    pub negativity: f64,
    pub schmidt: [f64; 2],
    pub flipped_min_eigenvalue: f64,
    /// Frobenius norm of `P^2 - P` for the flipped projector.
    pub flipped_idempotency: f64,
}

#[derive(Debug, Serialize)]
pub struct PptOutput {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub entries: Vec<OperatorOutput>,
}

fn analyze(psi: &dirq_core::TwoQubitState) -> Result<OperatorOutput, CliError> {
    let rho: Mat4 = *pure_density(psi).matrix();
    let flipped = projector_defect(&passive_flip(&rho))?;
    Ok(OperatorOutput {
        decomposition: pauli_decompose(&rho)?.into(),
        partial_transpose_eigenvalues: hermitian_eigen(&partial_transpose(
            &rho,
            Subsystem::Second,
        ))?
        .values,
        negativity: negativity(&rho)?,
        schmidt: schmidt_coefficients(psi),
        flipped_min_eigenvalue: flipped.min_eigenvalue,
        flipped_idempotency: flipped.idempotency,
    })
}

fn cmd_ppt(a: PptArgs) -> Result<i32, CliError> {
    let (kind, label, states) = match (&a.file, a.preset) {
        (_, Some(p)) => {
            let m = p.build()?;
            (
                "measurement",
                Some(m.label().to_string()),
                m.basis().to_vec(),
            )
        }
        (Some(path), None) => match read_json::<PptInput>(path)? {
            PptInput::Measurement(f) => {
                let m = validated(&f)?;
                (
                    "measurement",
                    Some(m.label().to_string()),
                    m.basis().to_vec(),
                )
            }
            PptInput::TwoQubit(f) => ("state", None, vec![f.to_state()?]),
        },
        (None, None) => return Err(CliError::Usage("a file or --preset is required".into())),
    };
    let entries = states.iter().map(analyze).collect::<Result<Vec<_>, _>>()?;
    let out = PptOutput {
        kind,
        label,
        entries,
    };
    let mut summary = String::new();
    for (j, e) in out.entries.iter().enumerate() {
        let _ = writeln!(
            summary,
            "{kind} {j}: PT eigenvalues {:?}, negativity {:.6}, flipped ||P^2-P|| {:.6}",
            e.partial_transpose_eigenvalues, e.negativity, e.flipped_idempotency
        );
    }
    emit(&a.common, &out, &summary)?;
    Ok(exit::OK)
}
