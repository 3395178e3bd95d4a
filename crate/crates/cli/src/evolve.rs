use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use vld_core::biot_savart::{check_35_bound, VelocityBoundReport};
use vld_core::criteria::Theorem1Sample;
use vld_core::euler_sim::{run_with_diagnostics, write_lines_csv, RunConfig, SeedPolicy};
use vld_core::io::{save_vlf, VlfField};

use crate::manifest::{now_ms, FileDigest, RunManifest, MANIFEST_FILE};
use crate::output::{fmt_f, initial_field, json_string, load_vector, Failure};
use crate::{FieldOpts, InitKind};

pub const TIMELINE_FILE: &str = "timeline.csv";
pub const LINES_FILE: &str = "lines.csv";
pub const BOUND_FILE: &str = "velocity_bound.csv";
pub const ENDPOINTS_FILE: &str = "line_endpoints.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";

pub const BOUND_HEADER: &str = "row,t,U_measured,Omega,u_l2,rho_used,bound_value,ratio,pass";
pub const ENDPOINTS_HEADER: &str = "row,t,div_integral,omega_x,omega_y";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Re-trace through the vorticity maximum at every record.
    Argmax,
    /// As `argmax` with length a fraction of the box side.
    Fraction,
    /// Seed carried by the flow from the first maximum.
    Lagrangian,
}

#[derive(Args, Debug, Serialize)]
pub struct EvolveArgs {
    #[arg(long, required_unless_present = "init_file", conflicts_with = "init_file")]
    pub init: Option<InitKind>,
    /// Initial velocity as a VLF1 file.
    #[arg(long)]
    pub init_file: Option<PathBuf>,
    #[command(flatten)]
    pub field: FieldOpts,
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub t_end: f64,
    /// Record every this many steps.
    #[arg(long, default_value_t = 10)]
    pub every: usize,
    #[arg(long, value_enum, default_value_t = Policy::Argmax)]
    pub policy: Policy,
    #[arg(long, default_value_t = 1.0)]
    pub line_length: f64,
    /// Line length as a fraction of the box side, for `--policy fraction`.
    #[arg(long, default_value_t = 0.25)]
    pub fraction: f64,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
    /// Skip the VLF1 velocity snapshots.
    #[arg(long)]
    pub no_snapshots: bool,
}

fn bound_row(row: usize, t: f64, r: &VelocityBoundReport) -> String {
    let vals = [t, r.u_measured, r.omega, r.u_l2, r.rho_used, r.bound_value, r.ratio].map(fmt_f).join(",");
    format!("{row},{vals},{}", r.pass)
}

fn endpoints_row(row: usize, t: f64, s: Option<&Theorem1Sample>) -> String {
    let v = s.map_or([f64::NAN; 3], |s| [s.div_integral, s.omega_x, s.omega_y]);
    format!("{row},{},{}", fmt_f(t), v.map(fmt_f).join(","))
}

fn write_lines(path: &Path, header: &str, rows: &[String]) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    out: &'a Path,
    rows: usize,
    t_final: f64,
    omega_initial: f64,
    omega_final: f64,
    bkm_integral: f64,
    velocity_bound_pass: bool,
}

pub fn run(a: &EvolveArgs) -> Result<bool, Failure> {
    let start = now_ms();
    let mut inputs = Vec::new();
    let u0 = match (&a.init_file, a.init) {
        (Some(p), _) => {
            inputs.push(FileDigest::of(p, Path::new(""))?);
            load_vector(p)?
        }
        (None, Some(k)) => initial_field(k, &a.field)?,
        (None, None) => return Err(Failure::Usage("one of --init or --init-file is required".into())),
    };
    let policy = match a.policy {
        Policy::Argmax => SeedPolicy::ThroughArgmax { length: a.line_length },
        Policy::Fraction => SeedPolicy::ArgmaxFraction { fraction: a.fraction },
        Policy::Lagrangian => SeedPolicy::Lagrangian { length: a.line_length },
    };
    let cfg = RunConfig { t_end: a.t_end, dt: a.dt, every: a.every, policy };

    fs::create_dir_all(&a.out)?;
    let snap_dir = a.out.join(SNAPSHOT_DIR);
    if !a.no_snapshots {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut snapshots = Vec::new();
    let mut bounds = Vec::new();
    let mut endpoints = Vec::new();
    let mut all_pass = true;
    let out = run_with_diagnostics(&u0, &cfg, |s| {
        let row = bounds.len();
        if !a.no_snapshots {
            let p = snap_dir.join(format!("u_{:06}.vlf", s.step));
            save_vlf(&p, &VlfField::vector("u", s.u.clone()))?;
            snapshots.push(p);
        }
        let b = check_35_bound(s.u, s.omega)?;
        all_pass &= b.pass;
        bounds.push(bound_row(row, s.row.t, &b));
        let sample = s.line.map(|l| Theorem1Sample::from_line(s.row.t, l)).transpose()?;
        endpoints.push(endpoints_row(row, s.row.t, sample.as_ref()));
        Ok(())
    })?;

    let timeline_path = a.out.join(TIMELINE_FILE);
    let mut w = BufWriter::new(File::create(&timeline_path)?);
    out.timeline.write_csv(&mut w)?;
    w.flush()?;
    drop(w);
    let lines_path = a.out.join(LINES_FILE);
    write_lines_csv(BufWriter::new(File::create(&lines_path)?), &out.timeline, &out.lines)?;
    let bound_path = a.out.join(BOUND_FILE);
    write_lines(&bound_path, BOUND_HEADER, &bounds)?;
    let endpoints_path = a.out.join(ENDPOINTS_FILE);
    write_lines(&endpoints_path, ENDPOINTS_HEADER, &endpoints)?;

    let mut outputs = Vec::new();
    for p in [&timeline_path, &lines_path, &bound_path, &endpoints_path].into_iter().chain(&snapshots) {
        outputs.push(FileDigest::of(p, &a.out)?);
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        format_version: "VLF1".into(),
        argv: std::env::args().collect(),
        config: serde_json::to_value(a)?,
        rng_seed: a.field.rng_seed,
        start_unix_ms: start,
        end_unix_ms: now_ms(),
        inputs,
        outputs,
    };
    fs::write(a.out.join(MANIFEST_FILE), json_string(&manifest)?)?;

    let rows = &out.timeline.rows;
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let summary = Summary {
        out: &a.out,
        rows: rows.len(),
        t_final: last.t,
        omega_initial: first.omega,
        omega_final: last.omega,
        bkm_integral: last.bkm_integral,
        velocity_bound_pass: all_pass,
    };
    print!("{}", json_string(&summary)?);
    Ok(true)
}
