use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use vld_core::generators::{gen_field, FieldKind};
use vld_core::io::load_vlf;
use vld_core::{Grid3, VectorField3};

use crate::{FieldOpts, InitKind};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable input, invalid configuration.
    Usage(String),
    /// A criterion or residual outside its tolerance.
    Check(String),
}

impl From<vld_core::Error> for Failure {
    fn from(e: vld_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub fn initial_field(kind: InitKind, o: &FieldOpts) -> Result<VectorField3, Failure> {
    let grid = Grid3::cube(o.n)?;
    let k = match kind {
        InitKind::Tg => FieldKind::TaylorGreen,
        InitKind::Abc => FieldKind::abc_unit(),
        InitKind::Tubes => FieldKind::default_tubes(),
        InitKind::Shear => FieldKind::ShearLayer,
        InitKind::Random => FieldKind::RandomSolenoidal { seed: o.rng_seed, spectrum_slope: o.slope },
    };
    Ok(gen_field(k, grid)?)
}

pub fn load_vector(path: &Path) -> Result<VectorField3, Failure> {
    load_vlf(path)
        .and_then(|f| f.into_vector())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Parses `a,b,c`.
pub fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(format!("expected three comma-separated numbers, got {s:?}")),
    }
}

#[derive(Debug, Clone)]
pub struct PointList(pub Vec<[f64; 3]>);

/// Parses `a,b,c;d,e,f;...`.
pub fn parse_points(s: &str) -> Result<PointList, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect::<Result<_, _>>().map(PointList)
}

pub fn json_string<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Prints `v` as JSON and writes the same bytes to `out` when given.
pub fn emit_json<T: Serialize>(v: &T, out: Option<&Path>) -> Result<(), Failure> {
    let s = json_string(v)?;
    if let Some(p) = out {
        fs::write(p, &s)?;
    }
    std::io::stdout().write_all(s.as_bytes())?;
    Ok(())
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn sha256_file(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}
