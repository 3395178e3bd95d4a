//! Grid-sampled scalar and vector fields.

use crate::error::{Error, Result};
use crate::grid::Grid3;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    grid: Grid3,
    data: Vec<f64>,
}

impl ScalarField3 {
    pub fn new(grid: Grid3, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape(format!(
                "scalar data has {} values, grid needs {}",
                data.len(),
                grid.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("scalar field contains non-finite values".into()));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for k in 0..grid.nz {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    data.push(f(grid.position(i, j, k)));
                }
            }
        }
        Self { grid, data }
    }

    /// Construction without the finiteness scan, for internal outputs.
    pub(crate) fn from_vec_unchecked(grid: Grid3, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

/// Three scalar components on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    comps: [ScalarField3; 3],
}

impl VectorField3 {
    pub fn new(comps: [ScalarField3; 3]) -> Result<Self> {
        if comps[1].grid != comps[0].grid || comps[2].grid != comps[0].grid {
            return Err(Error::Shape("vector components live on different grids".into()));
        }
        Ok(Self { comps })
    }

    pub fn from_components(grid: Grid3, data: [Vec<f64>; 3]) -> Result<Self> {
        let [a, b, c] = data;
        Self::new([
            ScalarField3::new(grid, a)?,
            ScalarField3::new(grid, b)?,
            ScalarField3::new(grid, c)?,
        ])
    }

    pub(crate) fn from_components_unchecked(grid: Grid3, data: [Vec<f64>; 3]) -> Self {
        let [a, b, c] = data;
        Self {
            comps: [
                ScalarField3::from_vec_unchecked(grid, a),
                ScalarField3::from_vec_unchecked(grid, b),
                ScalarField3::from_vec_unchecked(grid, c),
            ],
        }
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self { comps: [0, 1, 2].map(|_| ScalarField3::zeros(grid)) }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut data = [
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        ];
        for k in 0..grid.nz {
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let v = f(grid.position(i, j, k));
                    for d in 0..3 {
                        data[d].push(v[d]);
                    }
                }
            }
        }
        Self::from_components_unchecked(grid, data)
    }

    pub fn grid(&self) -> &Grid3 {
        self.comps[0].grid()
    }

    pub fn component(&self, d: usize) -> &ScalarField3 {
        &self.comps[d]
    }

    pub fn component_mut(&mut self, d: usize) -> &mut ScalarField3 {
        &mut self.comps[d]
    }

    pub fn components(&self) -> [&[f64]; 3] {
        [self.comps[0].data(), self.comps[1].data(), self.comps[2].data()]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0].data[idx], self.comps[1].data[idx], self.comps[2].data[idx]]
    }

    pub fn magnitude(&self) -> ScalarField3 {
        let [a, b, c] = self.components();
        let data = (0..a.len())
            .map(|i| (a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt())
            .collect();
        ScalarField3::from_vec_unchecked(*self.grid(), data)
    }

    pub fn max_magnitude(&self) -> f64 {
        let [a, b, c] = self.components();
        (0..a.len()).fold(0.0, |m, i| m.max((a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sqrt()))
    }

    /// Largest absolute value over all three components.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn means(&self) -> [f64; 3] {
        [self.comps[0].mean(), self.comps[1].mean(), self.comps[2].mean()]
    }

    /// `0.5 * sum |v|^2 dV` over the box.
    pub fn energy(&self) -> f64 {
        let [a, b, c] = self.components();
        let s: f64 = (0..a.len()).map(|i| a[i] * a[i] + b[i] * b[i] + c[i] * c[i]).sum();
        0.5 * s * self.grid().cell_volume()
    }

    /// `(sum |v|^2 dV)^(1/2)` over the box.
    pub fn l2_norm(&self) -> f64 {
        (2.0 * self.energy()).sqrt()
    }

    /// `sum v.w dV`.
    pub fn inner(&self, other: &VectorField3) -> f64 {
        let a = self.components();
        let b = other.components();
        let s: f64 = (0..a[0].len())
            .map(|i| a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i])
            .sum();
        s * self.grid().cell_volume()
    }

    pub fn scale(&self, f: f64) -> Self {
        Self { comps: [0, 1, 2].map(|d| self.comps[d].map(|v| v * f)) }
    }

    /// `a*self + b*other`.
    pub fn axpby(&self, a: f64, other: &VectorField3, b: f64) -> Self {
        let data = [0, 1, 2].map(|d| {
            self.comps[d]
                .data
                .iter()
                .zip(&other.comps[d].data)
                .map(|(x, y)| a * x + b * y)
                .collect()
        });
        Self::from_components_unchecked(*self.grid(), data)
    }

    /// Max over grid nodes of `|self - other|` (Euclidean per node).
    pub fn max_diff(&self, other: &VectorField3) -> f64 {
        self.axpby(1.0, other, -1.0).max_magnitude()
    }
}

#[inline]
pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: [f64; 3], f: f64) -> [f64; 3] {
    [a[0] * f, a[1] * f, a[2] * f]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        let g = Grid3::cube(4).unwrap();
        assert!(ScalarField3::new(g, vec![0.0; 10]).is_err());
        let mut v = vec![0.0; 64];
        v[3] = f64::NAN;
        assert!(ScalarField3::new(g, v).is_err());
        let g2 = Grid3::cube(6).unwrap();
        assert!(VectorField3::new([
            ScalarField3::zeros(g),
            ScalarField3::zeros(g2),
            ScalarField3::zeros(g)
        ])
        .is_err());
    }

    #[test]
    fn energy_of_unit_field() {
        let g = Grid3::cube(8).unwrap();
        let v = VectorField3::from_fn(g, |_| [1.0, 0.0, 0.0]);
        let vol = g.lx * g.ly * g.lz;
        assert!((v.energy() - 0.5 * vol).abs() < 1e-10);
    }
}
