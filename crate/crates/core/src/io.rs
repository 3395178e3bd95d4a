//! "VLF1" field files.
//!
//! Layout: the ASCII bytes `VLF1`, a newline, one JSON header line
//! `{"nx":..,"ny":..,"nz":..,"lx":..,"ly":..,"lz":..,"ncomp":1|3,"name":..}`,
//! a newline, then `ncomp*nx*ny*nz` little-endian f64 values, component-major
//! and x-fastest within a component.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{ScalarField3, VectorField3};
use crate::grid::Grid3;

pub const MAGIC: &[u8; 4] = b"VLF1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlfHeader {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
    pub ncomp: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField3),
    Vector(VectorField3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VlfField {
    pub name: String,
    pub data: FieldData,
}

impl VlfField {
    pub fn vector(name: impl Into<String>, v: VectorField3) -> Self {
        Self { name: name.into(), data: FieldData::Vector(v) }
    }

    pub fn scalar(name: impl Into<String>, s: ScalarField3) -> Self {
        Self { name: name.into(), data: FieldData::Scalar(s) }
    }

    pub fn into_vector(self) -> Result<VectorField3> {
        match self.data {
            FieldData::Vector(v) => Ok(v),
            FieldData::Scalar(_) => Err(Error::Format(format!("field '{}' is scalar, expected 3 components", self.name))),
        }
    }

    fn grid(&self) -> Grid3 {
        match &self.data {
            FieldData::Scalar(s) => *s.grid(),
            FieldData::Vector(v) => *v.grid(),
        }
    }
}

pub fn write_vlf<W: Write>(mut w: W, field: &VlfField) -> Result<()> {
    let g = field.grid();
    let comps: Vec<&[f64]> = match &field.data {
        FieldData::Scalar(s) => vec![s.data()],
        FieldData::Vector(v) => v.components().to_vec(),
    };
    let header = VlfHeader {
        nx: g.nx,
        ny: g.ny,
        nz: g.nz,
        lx: g.lx,
        ly: g.ly,
        lz: g.lz,
        ncomp: comps.len(),
        name: field.name.clone(),
    };
    w.write_all(MAGIC)?;
    w.write_all(b"\n")?;
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for c in comps {
        for v in c {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_vlf<R: BufRead>(mut r: R) -> Result<VlfField> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic[..4] != MAGIC || magic[4] != b'\n' {
        return Err(Error::Format("missing VLF1 magic".into()));
    }
    let mut line = String::new();
    r.read_line(&mut line)?;
    if !line.ends_with('\n') {
        return Err(Error::Format("unterminated header line".into()));
    }
    let h: VlfHeader = serde_json::from_str(line.trim_end_matches('\n'))?;
    if h.ncomp != 1 && h.ncomp != 3 {
        return Err(Error::Format(format!("ncomp must be 1 or 3, got {}", h.ncomp)));
    }
    let grid = Grid3::new(h.nx, h.ny, h.nz, h.lx, h.ly, h.lz)?;
    let mut comps = Vec::with_capacity(h.ncomp);
    let mut buf = vec![0u8; 8 * grid.len()];
    for _ in 0..h.ncomp {
        r.read_exact(&mut buf)
            .map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
        comps.push(
            buf.chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect::<Vec<f64>>(),
        );
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    let data = if h.ncomp == 1 {
        FieldData::Scalar(ScalarField3::new(grid, comps.pop().expect("one component"))?)
    } else {
        let c = comps.pop().expect("3");
        let b = comps.pop().expect("3");
        let a = comps.pop().expect("3");
        FieldData::Vector(VectorField3::from_components(grid, [a, b, c])?)
    };
    Ok(VlfField { name: h.name, data })
}

pub fn save_vlf(path: impl AsRef<Path>, field: &VlfField) -> Result<()> {
    write_vlf(BufWriter::new(File::create(path)?), field)
}

pub fn load_vlf(path: impl AsRef<Path>) -> Result<VlfField> {
    read_vlf(BufReader::new(File::open(path)?))
}
