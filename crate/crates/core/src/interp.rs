//! Point sampling of periodic grid fields.
//!
//! `Trilinear` is the default. `Tricubic` and `Quintic` (4- and 6-point
//! Lagrange per axis) serve along-line quantities, where second-order
//! interpolation error would swamp the identities being checked.

use serde::{Deserialize, Serialize};

use crate::field::{ScalarField3, VectorField3};
use crate::grid::Grid3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Trilinear,
    Tricubic,
    /// 6-point Lagrange per axis.
    Quintic,
}

/// One axis of an interpolation stencil: first node index and weights.
#[derive(Debug, Clone, Copy)]
struct AxisStencil {
    start: isize,
    w: [f64; 6],
    len: usize,
}

fn axis_stencil(x: f64, h: f64, method: Interpolation) -> AxisStencil {
    let q = x / h;
    let base = q.floor();
    let t = q - base;
    let base = base as isize;
    match method {
        Interpolation::Trilinear => AxisStencil { start: base, w: [1.0 - t, t, 0.0, 0.0, 0.0, 0.0], len: 2 },
        Interpolation::Tricubic => AxisStencil { start: base - 1, w: lagrange::<4>(t), len: 4 },
        Interpolation::Quintic => AxisStencil { start: base - 2, w: lagrange::<6>(t), len: 6 },
    }
}

/// Lagrange weights on nodes `-(N/2-1)..=N/2` evaluated at `t` in `[0, 1)`.
fn lagrange<const N: usize>(t: f64) -> [f64; 6] {
    let first = 1 - (N as isize) / 2;
    let mut w = [0.0; 6];
    for (a, wa) in w.iter_mut().enumerate().take(N) {
        let xa = (first + a as isize) as f64;
        let mut v = 1.0;
        for b in 0..N {
            if b != a {
                let xb = (first + b as isize) as f64;
                v *= (t - xb) / (xa - xb);
            }
        }
        *wa = v;
    }
    w
}

fn stencils(grid: &Grid3, x: [f64; 3], method: Interpolation) -> [AxisStencil; 3] {
    let x = grid.wrap(x);
    let h = grid.spacing();
    [0, 1, 2].map(|d| axis_stencil(x[d], h[d], method))
}

/// Calls `f(flat_index, weight)` for every stencil node of `x`.
fn for_each_node(grid: &Grid3, x: [f64; 3], method: Interpolation, mut f: impl FnMut(usize, f64)) {
    let [sx, sy, sz] = stencils(grid, x, method);
    for c in 0..sz.len {
        for b in 0..sy.len {
            let wyz = sy.w[b] * sz.w[c];
            for a in 0..sx.len {
                let idx = grid.index_wrapped(sx.start + a as isize, sy.start + b as isize, sz.start + c as isize);
                f(idx, sx.w[a] * wyz);
            }
        }
    }
}

pub fn sample_scalar(field: &ScalarField3, x: [f64; 3], method: Interpolation) -> f64 {
    let data = field.data();
    let mut acc = 0.0;
    for_each_node(field.grid(), x, method, |idx, w| acc += w * data[idx]);
    acc
}

pub fn sample_vector(field: &VectorField3, x: [f64; 3], method: Interpolation) -> [f64; 3] {
    let [a, b, c] = field.components();
    let mut acc = [0.0; 3];
    for_each_node(field.grid(), x, method, |idx, w| {
        acc[0] += w * a[idx];
        acc[1] += w * b[idx];
        acc[2] += w * c[idx];
    });
    acc
}

/// True when every node the interpolant at `x` touches is flagged valid.
pub fn stencil_valid(grid: &Grid3, mask: &[bool], x: [f64; 3], method: Interpolation) -> bool {
    let mut ok = true;
    for_each_node(grid, x, method, |idx, _| ok &= mask[idx]);
    ok
}

/// Trilinear point sampling, wrapped periodically.
pub trait Sample {
    type Output;
    fn sample(&self, x: [f64; 3]) -> Self::Output {
        self.sample_with(x, Interpolation::Trilinear)
    }
    fn sample_with(&self, x: [f64; 3], method: Interpolation) -> Self::Output;
}

impl Sample for ScalarField3 {
    type Output = f64;
    fn sample_with(&self, x: [f64; 3], method: Interpolation) -> f64 {
        sample_scalar(self, x, method)
    }
}

impl Sample for VectorField3 {
    type Output = [f64; 3];
    fn sample_with(&self, x: [f64; 3], method: Interpolation) -> [f64; 3] {
        sample_vector(self, x, method)
    }
}
