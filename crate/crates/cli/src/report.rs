use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use vld_core::criteria::{fit_scaling, ScalingFit};
use vld_core::euler_sim::DiagnosticsTimeline;

use crate::evolve::TIMELINE_FILE;
use crate::manifest::read_manifest;
use crate::output::{fmt_f, Failure};

pub const REPORT_FILE: &str = "report.md";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const FIT_FILE: &str = "fit.csv";

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Run directory written by `evolve`.
    pub run_dir: PathBuf,
    /// Assumed singular time for the exponent fit; 1.1 times the last
    /// recorded time by default.
    #[arg(long)]
    pub t_est: Option<f64>,
    /// Relative `Omega` variation below which the run counts as constant.
    #[arg(long, default_value_t = 1e-6)]
    pub omega_tol: f64,
    /// Directory for the report files; the run directory by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn finite_range(v: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    v.filter(|x| x.is_finite()).fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

fn fit_section(md: &mut String, fit: &Result<ScalingFit, vld_core::Error>) {
    md.push_str("\n## Fitted exponents\n\n");
    let f = match fit {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(md, "Fit not available: {e}.");
            return;
        }
    };
    let _ = writeln!(md, "T_est = {}\n", fmt_f(f.t_est));
    md.push_str("| exponent | value | stderr | band low | band high |\n|---|---|---|---|---|\n");
    for (name, e) in [("alpha_hat", f.alpha_hat), ("beta_hat", f.beta_hat), ("gamma_hat", f.gamma_hat)] {
        let _ = writeln!(
            md,
            "| {name} | {} | {} | {} | {} |",
            fmt_f(e.value),
            fmt_f(e.stderr),
            fmt_f(e.band[0]),
            fmt_f(e.band[1])
        );
    }
    md.push_str("\nT_est sensitivity:\n\n| T_est | alpha_hat | beta_hat | gamma_hat | rows |\n|---|---|---|---|---|\n");
    for r in &f.sensitivity {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} |",
            fmt_f(r.t_est),
            fmt_f(r.alpha_hat),
            fmt_f(r.beta_hat),
            fmt_f(r.gamma_hat),
            r.rows_used
        );
    }
    if f.inconclusive {
        let _ = writeln!(md, "\nInconclusive: {}.", f.notes);
    }
}

pub fn run(a: &ReportArgs) -> Result<bool, Failure> {
    let manifest = read_manifest(&a.run_dir)?;
    let tl_path = a.run_dir.join(TIMELINE_FILE);
    let file = File::open(&tl_path).map_err(|e| Failure::Usage(format!("{}: {e}", tl_path.display())))?;
    let tl = DiagnosticsTimeline::read_csv(BufReader::new(file))?;
    let rows = &tl.rows;
    if rows.is_empty() {
        return Err(Failure::Usage(format!("{} has no rows", tl_path.display())));
    }
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let (om_lo, om_hi) = finite_range(rows.iter().map(|r| r.omega)).unwrap_or((f64::NAN, f64::NAN));
    let variation = (om_hi - om_lo) / first.omega;
    let energy_drift = (last.energy - first.energy).abs() / first.energy;
    let ml = finite_range(rows.iter().map(|r| r.ml_product));
    let t_est = a.t_est.unwrap_or(1.1 * last.t);
    let fit = fit_scaling(&tl, t_est);

    let mut md = String::new();
    let _ = writeln!(md, "# Run report\n");
    let _ = writeln!(md, "Command: `{}`\n", manifest.argv.join(" "));
    let _ = writeln!(md, "Rows: {}, t from {} to {}.", rows.len(), fmt_f(first.t), fmt_f(last.t));
    md.push_str("\n## Vorticity maximum\n\n");
    let _ = writeln!(md, "Omega(0) = {}, Omega(end) = {}, growth factor {}.", fmt_f(first.omega), fmt_f(last.omega), fmt_f(last.omega / first.omega));
    if variation <= a.omega_tol {
        let _ = writeln!(md, "Omega constant within tolerance {}: relative variation {}.", fmt_f(a.omega_tol), fmt_f(variation));
    } else {
        let _ = writeln!(md, "Omega varies by {} relative (tolerance {}).", fmt_f(variation), fmt_f(a.omega_tol));
    }
    md.push_str("\n## Integrals\n\n");
    let _ = writeln!(md, "BKM integral to t = {}: {}.", fmt_f(last.t), fmt_f(last.bkm_integral));
    let _ = writeln!(md, "Relative energy drift: {}.", fmt_f(energy_drift));
    md.push_str("\n## Line geometry\n\n");
    match ml {
        Some((lo, hi)) => {
            let _ = writeln!(md, "M L between {} and {}.", fmt_f(lo), fmt_f(hi));
        }
        None => md.push_str("No traced line at any recorded time.\n"),
    }
    fit_section(&mut md, &fit);

    let mut summary = String::from("quantity,value\n");
    for (k, v) in [
        ("omega_initial", first.omega),
        ("omega_final", last.omega),
        ("omega_relative_variation", variation),
        ("bkm_integral", last.bkm_integral),
        ("energy_drift", energy_drift),
        ("ml_min", ml.map_or(f64::NAN, |m| m.0)),
        ("ml_max", ml.map_or(f64::NAN, |m| m.1)),
        ("t_est", t_est),
    ] {
        let _ = writeln!(summary, "{k},{}", fmt_f(v));
    }
    if let Ok(f) = &fit {
        for (k, e) in [("alpha_hat", f.alpha_hat), ("beta_hat", f.beta_hat), ("gamma_hat", f.gamma_hat)] {
            let _ = writeln!(summary, "{k},{}", fmt_f(e.value));
            let _ = writeln!(summary, "{k}_stderr,{}", fmt_f(e.stderr));
        }
    }
    let mut fit_csv = String::from("t_est,alpha_hat,beta_hat,gamma_hat,rows_used\n");
    if let Ok(f) = &fit {
        for r in &f.sensitivity {
            let _ = writeln!(fit_csv, "{},{},{},{},{}", fmt_f(r.t_est), fmt_f(r.alpha_hat), fmt_f(r.beta_hat), fmt_f(r.gamma_hat), r.rows_used);
        }
    }

    let out = a.out.clone().unwrap_or_else(|| a.run_dir.clone());
    fs::create_dir_all(&out)?;
    fs::write(out.join(REPORT_FILE), &md)?;
    fs::write(out.join(SUMMARY_FILE), summary)?;
    fs::write(out.join(FIT_FILE), fit_csv)?;
    print!("{md}");
    Ok(true)
}
