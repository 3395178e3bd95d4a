use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use vld_core::biot_savart::{bs_spectral_invert, bs_velocity_many, check_35_bound, VelocityBoundReport};
use vld_core::criteria::{
    contradiction_replay, scenario_preset, theorem1_check, theorem2_check, ScalingScenario, Theorem1Sample, Verdict,
    DEFAULT_C0_LOWER, DEFAULT_C0_UPPER, DEFAULT_C_BUDGET,
};
use vld_core::euler_sim::{
    check_lemma2, check_stretching_inequalities, evolve_with_markers, line_snapshot, EulerSolver, MaterialLine,
    StretchingReport, DEFAULT_MARKERS,
};
use vld_core::interp::Interpolation;
use vld_core::io::{save_vlf, VlfField};
use vld_core::spectral::{curl, divergence};
use vld_core::vortex_line::{check_lemma1, summarize, write_line_csv, Direction, LineDiagnostics, LineFields, Termination, VortexLine};

use crate::evolve::{ENDPOINTS_FILE, SNAPSHOT_DIR};
use crate::output::{emit_json, initial_field, load_vector, parse_point, parse_points, Failure, PointList};
use crate::{FieldOpts, InitKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceDirection {
    Forward,
    Backward,
    /// Half the length each way through the seed.
    Through,
}

#[derive(Args, Debug)]
pub struct LineArgs {
    /// Vorticity field (VLF1).
    #[arg(long)]
    pub omega: PathBuf,
    /// Velocity field for the tangential and normal components.
    #[arg(long)]
    pub velocity: Option<PathBuf>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub seed: [f64; 3],
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Arc-length step; a quarter of the grid spacing by default.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, value_enum, default_value_t = TraceDirection::Forward)]
    pub direction: TraceDirection,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn traced_line(a: &LineArgs) -> Result<VortexLine, Failure> {
    let w = load_vector(&a.omega)?;
    let u = a.velocity.as_deref().map(load_vector).transpose()?;
    let f = LineFields::new(&w, u.as_ref())?;
    let h = a.step.unwrap_or(w.grid().min_spacing() / 4.0);
    let line = match a.direction {
        TraceDirection::Forward => f.trace(a.seed, a.length, h, Direction::Forward)?,
        TraceDirection::Backward => f.trace(a.seed, a.length, h, Direction::Backward)?,
        TraceDirection::Through => f.trace_through(a.seed, a.length, h)?,
    };
    Ok(line)
}

pub fn trace(a: &LineArgs) -> Result<bool, Failure> {
    let line = traced_line(a)?;
    match &a.out {
        Some(p) => write_line_csv(BufWriter::new(File::create(p)?), &line)?,
        None => write_line_csv(std::io::stdout().lock(), &line)?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct LineDiagOutput {
    samples: usize,
    termination: Termination,
    diagnostics: LineDiagnostics,
}

pub fn line_diag(a: &LineArgs) -> Result<bool, Failure> {
    let line = traced_line(a)?;
    let out = LineDiagOutput { samples: line.len(), termination: line.terminated_reason, diagnostics: summarize(&line)? };
    emit_json(&out, a.out.as_deref())?;
    Ok(true)
}

#[derive(Args, Debug)]
pub struct Lemma1Args {
    #[command(flatten)]
    pub line: LineArgs,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(Serialize)]
struct Lemma1Output {
    max_rel_residual: f64,
    trapezoid_rel_residual: f64,
    tol: f64,
    pass: bool,
    samples: usize,
    length: f64,
    termination: Termination,
}

pub fn lemma1(a: &Lemma1Args) -> Result<bool, Failure> {
    let line = traced_line(&a.line)?;
    let r = check_lemma1(&line)?;
    let pass = r.max_rel_residual <= a.tol;
    let out = Lemma1Output {
        max_rel_residual: r.max_rel_residual,
        trapezoid_rel_residual: r.trapezoid_rel_residual,
        tol: a.tol,
        pass,
        samples: line.len(),
        length: line.length,
        termination: line.terminated_reason,
    };
    emit_json(&out, a.line.out.as_deref())?;
    Ok(pass)
}

#[derive(Args, Debug)]
pub struct Lemma2Args {
    #[arg(long, required_unless_present = "init_file", conflicts_with = "init_file")]
    pub init: Option<InitKind>,
    #[arg(long)]
    pub init_file: Option<PathBuf>,
    #[command(flatten)]
    pub field: FieldOpts,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_end: f64,
    /// Steps between stretching-history records.
    #[arg(long, default_value_t = 100)]
    pub every: usize,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub seed: [f64; 3],
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    #[arg(long, default_value_t = DEFAULT_MARKERS)]
    pub markers: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Constant of the vorticity growth bound.
    #[arg(long, default_value_t = 1.0)]
    pub stretching_c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Lemma2Output {
    max_residual: f64,
    mean_residual: f64,
    excluded: Vec<usize>,
    markers: usize,
    spacing_warning: bool,
    tol: f64,
    lemma2_pass: bool,
    stretching: StretchingReport,
    pass: bool,
}

pub fn lemma2(a: &Lemma2Args) -> Result<bool, Failure> {
    let u0 = match (&a.init_file, a.init) {
        (Some(p), _) => load_vector(p)?,
        (None, Some(k)) => initial_field(k, &a.field)?,
        (None, None) => return Err(Failure::Usage("one of --init or --init-file is required".into())),
    };
    let g = *u0.grid();
    let w0 = curl(&u0);
    let f0 = LineFields::new(&w0, Some(&u0))?;
    let traced = f0.trace(a.seed, a.length, g.min_spacing() / 4.0, Direction::Forward)?;
    let line = MaterialLine::from_vortex_line(&traced, a.markers, 0.0)?;
    let mut history = Vec::new();
    let (end, pts) = evolve_with_markers(&u0, a.t_end, a.dt, a.every, &line.alpha_points, Interpolation::Quintic, |_, s, u, pts| {
        let ml = MaterialLine { current_points: pts.to_vec(), t: s.t, ..line.clone() };
        history.push(line_snapshot(&ml, &LineFields::new(&curl(u), Some(u))?)?);
        Ok(())
    })?;
    let mut moved = MaterialLine { current_points: pts, t: end.t, ..line.clone() };
    moved.warning = moved.spacing_degraded();
    let w_end = EulerSolver::new(g).vorticity(&end);
    let r = check_lemma2(&moved, &w0, &w_end)?;
    let stretching = check_stretching_inequalities(&history, a.stretching_c)?;
    let lemma2_pass = r.max_residual <= a.tol;
    let pass = lemma2_pass && stretching.pass;
    let out = Lemma2Output {
        max_residual: r.max_residual,
        mean_residual: r.mean_residual,
        excluded: r.excluded,
        markers: a.markers,
        spacing_warning: moved.warning,
        tol: a.tol,
        lemma2_pass,
        stretching,
        pass,
    };
    emit_json(&out, a.out.as_deref())?;
    Ok(pass)
}

#[derive(Args, Debug)]
pub struct BiotSavartArgs {
    #[arg(long)]
    pub omega: PathBuf,
    /// Direct-summation points `x,y,z;x,y,z;...`.
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
    pub points: Option<PointList>,
    /// Write the spectrally inverted velocity here.
    #[arg(long, required_unless_present = "points")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PointVelocity {
    x: [f64; 3],
    u: [f64; 3],
}

#[derive(Serialize)]
struct SpectralSummary {
    path: PathBuf,
    /// `max |curl u - omega| / max |omega|`
    curl_residual: f64,
    max_divergence: f64,
}

#[derive(Serialize)]
struct BiotSavartOutput {
    direct: Vec<PointVelocity>,
    spectral: Option<SpectralSummary>,
}

pub fn biot_savart(a: &BiotSavartArgs) -> Result<bool, Failure> {
    let w = load_vector(&a.omega)?;
    let direct = match &a.points {
        Some(PointList(pts)) => bs_velocity_many(&w, pts)?.into_iter().zip(pts).map(|(u, x)| PointVelocity { x: *x, u }).collect(),
        None => Vec::new(),
    };
    let spectral = match &a.out {
        Some(p) => {
            let u = bs_spectral_invert(&w)?;
            let scale = w.max_magnitude().max(f64::MIN_POSITIVE);
            let s = SpectralSummary {
                path: p.clone(),
                curl_residual: curl(&u).max_diff(&w) / scale,
                max_divergence: divergence(&u).max_abs(),
            };
            save_vlf(p, &VlfField::vector("u", u))?;
            Some(s)
        }
        None => None,
    };
    emit_json(&BiotSavartOutput { direct, spectral }, None)?;
    Ok(true)
}

#[derive(Args, Debug)]
pub struct Check35Args {
    /// Velocity field (VLF1).
    #[arg(long, required_unless_present = "run", conflicts_with = "run")]
    pub velocity: Option<PathBuf>,
    /// Run directory: checks every saved snapshot.
    #[arg(long)]
    pub run: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Check35Entry {
    file: String,
    report: VelocityBoundReport,
}

#[derive(Serialize)]
struct Check35Output {
    pass: bool,
    checked: usize,
    entries: Vec<Check35Entry>,
}

fn snapshot_files(run: &Path) -> Result<Vec<PathBuf>, Failure> {
    let dir = run.join(SNAPSHOT_DIR);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "vlf"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Usage(format!("no snapshots in {}", dir.display())));
    }
    Ok(files)
}

pub fn check_35(a: &Check35Args) -> Result<bool, Failure> {
    let files = match (&a.velocity, &a.run) {
        (Some(v), _) => vec![v.clone()],
        (None, Some(r)) => snapshot_files(r)?,
        (None, None) => return Err(Failure::Usage("one of --velocity or --run is required".into())),
    };
    let mut entries = Vec::new();
    for f in &files {
        let u = load_vector(f)?;
        let report = check_35_bound(&u, &curl(&u))?;
        let name = f.file_name().map_or_else(|| f.display().to_string(), |n| n.to_string_lossy().into_owned());
        entries.push(Check35Entry { file: name, report });
    }
    let pass = entries.iter().all(|e| e.report.pass);
    emit_json(&Check35Output { pass, checked: entries.len(), entries }, a.out.as_deref())?;
    Ok(pass)
}

#[derive(Args, Debug)]
pub struct Thm1Args {
    /// Run directory written by `evolve`.
    #[arg(long)]
    pub timeline: PathBuf,
    #[arg(long, default_value_t = DEFAULT_C_BUDGET)]
    pub budget: f64,
    /// Relative slack on the ratio corridor.
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rows of the endpoint table with a traced line; the count of rows without.
fn read_endpoints(dir: &Path) -> Result<(Vec<Theorem1Sample>, usize), Failure> {
    let p = dir.join(ENDPOINTS_FILE);
    let f = File::open(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    let mut samples = Vec::new();
    let mut skipped = 0;
    for (k, line) in BufReader::new(f).lines().enumerate().skip(1) {
        let line = line?;
        let v: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(format!("{}:{}: {e}", p.display(), k + 1)))?;
        let [t, d, wx, wy] = v[..] else {
            return Err(Failure::Usage(format!("{}:{}: expected 5 columns", p.display(), k + 1)));
        };
        if [d, wx, wy].iter().all(|x| x.is_finite()) {
            samples.push(Theorem1Sample { t, div_integral: d, omega_x: wx, omega_y: wy });
        } else {
            skipped += 1;
        }
    }
    Ok((samples, skipped))
}

pub fn thm1(a: &Thm1Args) -> Result<bool, Failure> {
    let (samples, skipped) = read_endpoints(&a.timeline)?;
    if samples.is_empty() {
        return Err(Failure::Usage("no recorded time has a traced line".into()));
    }
    let mut rep = theorem1_check(&samples, a.budget, a.tau)?;
    if skipped > 0 {
        let sep = if rep.verdict.notes.is_empty() { "" } else { "; " };
        rep.verdict.notes = format!("{}{sep}{skipped} recorded times without a traced line skipped", rep.verdict.notes);
    }
    emit_json(&rep, a.out.as_deref())?;
    Ok(rep.verdict.verdict != Verdict::ConditionsViolated)
}

#[derive(Args, Debug)]
pub struct Thm2Args {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Lower comparability constant.
    #[arg(long, default_value_t = DEFAULT_C0_LOWER)]
    pub c0: f64,
    /// Bound on `M L`.
    #[arg(long = "C0", default_value_t = DEFAULT_C0_UPPER)]
    pub c0_upper: f64,
    #[arg(long, default_value = "custom")]
    pub name: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn thm2(a: &Thm2Args) -> Result<bool, Failure> {
    let mut s = ScalingScenario::new(&a.name, a.alpha, a.beta, a.gamma);
    s.c0 = a.c0;
    s.c0_upper = a.c0_upper;
    let v = theorem2_check(&s);
    emit_json(&v, a.out.as_deref())?;
    Ok(v.verdict != Verdict::ConditionsViolated)
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// pelz, cfm, cf or kerr.
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScenarioOutput {
    scenario: ScalingScenario,
    #[serde(flatten)]
    verdict: vld_core::criteria::CriterionVerdict,
}

pub fn scenario(a: &ScenarioArgs) -> Result<bool, Failure> {
    let scenario = scenario_preset(&a.preset)?;
    let verdict = theorem2_check(&scenario);
    let ok = verdict.verdict != Verdict::ConditionsViolated;
    emit_json(&ScenarioOutput { scenario, verdict }, a.out.as_deref())?;
    Ok(ok)
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    #[arg(long, required_unless_present_all = ["alpha", "beta"])]
    pub preset: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Model `Omega = (T - t)^{-gamma}`.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// `T - t1`.
    #[arg(long, default_value_t = 0.01)]
    pub t1_gap: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 40)]
    pub k_max: usize,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long = "C0")]
    pub c0_upper: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn replay(a: &ReplayArgs) -> Result<bool, Failure> {
    let mut s = match &a.preset {
        Some(p) => scenario_preset(p)?,
        None => ScalingScenario::new("custom", a.alpha.unwrap_or(f64::NAN), a.beta.unwrap_or(f64::NAN), a.gamma),
    };
    if let Some(v) = a.alpha {
        s.alpha = v;
    }
    if let Some(v) = a.beta {
        s.beta = v;
    }
    s.gamma = a.gamma;
    if let Some(v) = a.c0 {
        s.c0 = v;
    }
    if let Some(v) = a.c0_upper {
        s.c0_upper = v;
    }
    if !(a.gamma > 0.0) || !(a.t1_gap > 0.0) {
        return Err(Failure::Usage("gamma and t1-gap must be positive".into()));
    }
    let (big_t, gamma) = (a.t_final, a.gamma);
    let omega = move |t: f64| (big_t - t).powf(-gamma);
    match contradiction_replay(&s, &omega, big_t - a.t1_gap, big_t, a.k_max) {
        Ok(rep) => {
            emit_json(&rep, a.out.as_deref())?;
            Ok(true)
        }
        Err(e @ vld_core::Error::ProofInapplicable(_)) => Err(Failure::Check(e.to_string())),
        Err(e) => Err(e.into()),
    }
}
