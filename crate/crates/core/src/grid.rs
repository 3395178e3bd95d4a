use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// A uniform periodic grid on the box `[0,lx) x [0,ly) x [0,lz)`.
///
/// Node `(i, j, k)` sits at `(i*hx, j*hy, k*hz)`; flat storage is x-fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

impl Grid3 {
    pub fn new(nx: usize, ny: usize, nz: usize, lx: f64, ly: f64, lz: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::Config(format!("{name} = {n} must be even and >= 4")));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly), ("lz", lz)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Config(format!("{name} = {l} must be positive and finite")));
            }
        }
        Ok(Self { nx, ny, nz, lx, ly, lz })
    }

    /// `n^3` points on the `2*pi` periodic cube.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n, TAU, TAU, TAU)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.lx, self.ly, self.lz]
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            self.lx / self.nx as f64,
            self.ly / self.ny as f64,
            self.lz / self.nz as f64,
        ]
    }

    pub fn min_spacing(&self) -> f64 {
        let h = self.spacing();
        h[0].min(h[1]).min(h[2])
    }

    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h[0] * h[1] * h[2]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    /// Flat index with periodic wrap of signed node coordinates.
    #[inline]
    pub fn index_wrapped(&self, i: isize, j: isize, k: isize) -> usize {
        let w = |a: isize, n: usize| a.rem_euclid(n as isize) as usize;
        self.index(w(i, self.nx), w(j, self.ny), w(k, self.nz))
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        (i, j, k)
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let h = self.spacing();
        [i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]]
    }

    /// Wraps a point into the fundamental box.
    pub fn wrap(&self, x: [f64; 3]) -> [f64; 3] {
        let l = self.lengths();
        [0, 1, 2].map(|d| x[d].rem_euclid(l[d]))
    }

    /// Minimum-image displacement `b - a`.
    pub fn min_image(&self, a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let l = self.lengths();
        [0, 1, 2].map(|d| {
            let mut v = b[d] - a[d];
            v -= l[d] * (v / l[d]).round();
            v
        })
    }

    pub fn center(&self) -> [f64; 3] {
        [self.lx / 2.0, self.ly / 2.0, self.lz / 2.0]
    }
}
