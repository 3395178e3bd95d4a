//! `vld`: generation, evolution, line tracing and criterion checks.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod checks;
mod evolve;
mod manifest;
mod output;
mod report;

use output::Failure;

#[derive(Parser, Debug)]
#[command(name = "vld", version, about = "Vortex-line geometry diagnostics for 3-D Euler flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an initial field as VLF1.
    Gen(GenArgs),
    /// Run the Euler solver and record diagnostics into a run directory.
    Evolve(evolve::EvolveArgs),
    /// Trace a vortex line and write it as CSV.
    Trace(checks::LineArgs),
    /// Summary diagnostics of one traced line.
    LineDiag(checks::LineArgs),
    /// Magnitude identity along a traced line.
    CheckLemma1(checks::Lemma1Args),
    /// Stretching identity on a material line carried by the flow.
    CheckLemma2(checks::Lemma2Args),
    /// Velocity from vorticity by direct summation or spectral inversion.
    BiotSavart(checks::BiotSavartArgs),
    /// Velocity bound by vorticity on a field or on every snapshot of a run.
    #[command(name = "check-35")]
    Check35(checks::Check35Args),
    /// Pointwise divergence-integral criterion on a run directory.
    CheckThm1(checks::Thm1Args),
    /// Exponent criterion for one scaling scenario.
    CheckThm2(checks::Thm2Args),
    /// Verdict for a literature preset.
    Scenario(checks::ScenarioArgs),
    /// Replay of the doubling argument on a power-law model.
    Replay(checks::ReplayArgs),
    /// Markdown and CSV summary of a run directory.
    Report(report::ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Tg,
    Abc,
    Tubes,
    Shear,
    Random,
}

/// Analytic initial condition options shared by `gen` and `evolve`.
#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct FieldOpts {
    /// Grid points per side.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    /// RNG seed for `random`.
    #[arg(long = "rng-seed", default_value_t = 0)]
    pub rng_seed: u64,
    /// Energy spectrum slope for `random`.
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub slope: f64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    kind: InitKind,
    #[command(flatten)]
    field: FieldOpts,
    /// Write the vorticity instead of the velocity.
    #[arg(long)]
    vorticity: bool,
    #[arg(long)]
    out: PathBuf,
}

fn gen(a: &GenArgs) -> Result<bool, Failure> {
    let u = output::initial_field(a.kind, &a.field)?;
    let (name, v) = if a.vorticity { ("omega", vld_core::spectral::curl(&u)) } else { ("u", u) };
    vld_core::io::save_vlf(&a.out, &vld_core::io::VlfField::vector(name, v))?;
    Ok(true)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("VLD_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("VLD_THREADS={v:?} is not a count")))?;
    if n == 0 {
        return Err(Failure::Usage("VLD_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn dispatch(cli: &Cli) -> Result<bool, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Evolve(a) => evolve::run(a),
        Command::Trace(a) => checks::trace(a),
        Command::LineDiag(a) => checks::line_diag(a),
        Command::CheckLemma1(a) => checks::lemma1(a),
        Command::CheckLemma2(a) => checks::lemma2(a),
        Command::BiotSavart(a) => checks::biot_savart(a),
        Command::Check35(a) => checks::check_35(a),
        Command::CheckThm1(a) => checks::thm1(a),
        Command::CheckThm2(a) => checks::thm2(a),
        Command::Scenario(a) => checks::scenario(a),
        Command::Replay(a) => checks::replay(a),
        Command::Report(a) => report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
