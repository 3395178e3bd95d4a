//! Vorticity direction field and its along-line derivatives.
//!
//! Derivatives of the direction field use 4th-order centered differences
//! restricted to the valid mask: the unit field jumps to zero at the mask edge,
//! so a global spectral derivative would ring into valid cells.

use crate::error::{Error, Result};
use crate::field::{ScalarField3, VectorField3};
use crate::grid::Grid3;

pub const DEFAULT_EPS_REL: f64 = 1e-8;
pub const DEFAULT_KAPPA_FLOOR: f64 = 1e-10;

/// Order of the centered difference stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdOrder {
    #[default]
    Fourth,
    Sixth,
}

impl FdOrder {
    /// Antisymmetric weights `c_m` for offsets `m = 1..`: `f' ~ sum c_m (f(+m) - f(-m)) / h`.
    fn weights(self) -> &'static [f64] {
        match self {
            FdOrder::Fourth => &[2.0 / 3.0, -1.0 / 12.0],
            FdOrder::Sixth => &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
        }
    }
}

/// `xi = omega / |omega|` where `|omega| >= threshold`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct MaskedDirectionField {
    pub xi: VectorField3,
    pub valid: Vec<bool>,
    pub threshold: f64,
}

impl MaskedDirectionField {
    pub fn grid(&self) -> &Grid3 {
        self.xi.grid()
    }

    /// Builds a mask-everywhere-valid field from an analytic unit vector function.
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let xi = VectorField3::from_fn(grid, f);
        Self { xi, valid: vec![true; grid.len()], threshold: 0.0 }
    }
}

pub fn unit_vorticity(w: &VectorField3, eps_rel: f64) -> Result<MaskedDirectionField> {
    if !(eps_rel > 0.0 && eps_rel < 1.0) {
        return Err(Error::Domain(format!("eps_rel = {eps_rel} must lie in (0, 1)")));
    }
    let mag = w.magnitude();
    let peak = mag.max_abs();
    if peak == 0.0 {
        return Err(Error::EmptyDirectionField);
    }
    let threshold = eps_rel * peak;
    let grid = *w.grid();
    let [a, b, c] = w.components();
    let mut valid = vec![false; grid.len()];
    let mut xi = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for (idx, &m) in mag.data().iter().enumerate() {
        if m >= threshold {
            valid[idx] = true;
            let v = [a[idx] / m, b[idx] / m, c[idx] / m];
            // one Newton step on the norm keeps | |xi| - 1 | at rounding level
            let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            let corr = 1.5 - 0.5 * n2;
            for d in 0..3 {
                xi[d][idx] = v[d] * corr;
            }
        }
    }
    Ok(MaskedDirectionField {
        xi: VectorField3::from_components_unchecked(grid, xi),
        valid,
        threshold,
    })
}

/// Grid fields derived from the direction field.
#[derive(Debug, Clone)]
pub struct DirectionDerivatives {
    pub div_xi: ScalarField3,
    pub kappa: ScalarField3,
    pub normal: VectorField3,
    /// False where the finite-difference stencil touched an invalid cell.
    pub valid: Vec<bool>,
}

pub fn direction_derivative_fields(xi: &MaskedDirectionField) -> DirectionDerivatives {
    direction_derivative_fields_with(xi, FdOrder::Fourth, DEFAULT_KAPPA_FLOOR)
}

pub fn direction_derivative_fields_with(
    xi: &MaskedDirectionField,
    order: FdOrder,
    kappa_floor: f64,
) -> DirectionDerivatives {
    let weights = order.weights();
    let reach = weights.len() as isize;
    let grid = *xi.grid();
    let h = grid.spacing();
    let comps = xi.xi.components();
    let n = grid.len();
    let mut div = vec![0.0; n];
    let mut kappa = vec![0.0; n];
    let mut normal = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut valid = vec![false; n];

    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.index(i, j, k);
                if !xi.valid[idx] {
                    continue;
                }
                let (ii, jj, kk) = (i as isize, j as isize, k as isize);
                let mut ok = true;
                // d[a][b] = d xi_b / d x_a
                let mut d = [[0.0; 3]; 3];
                for (axis, row) in d.iter_mut().enumerate() {
                    let at = |o: isize| match axis {
                        0 => grid.index_wrapped(ii + o, jj, kk),
                        1 => grid.index_wrapped(ii, jj + o, kk),
                        _ => grid.index_wrapped(ii, jj, kk + o),
                    };
                    let mut st = [(0usize, 0usize); 3];
                    for m in 1..=reach {
                        let pair = (at(m), at(-m));
                        if !xi.valid[pair.0] || !xi.valid[pair.1] {
                            ok = false;
                        }
                        st[(m - 1) as usize] = pair;
                    }
                    if !ok {
                        break;
                    }
                    for (b, out) in row.iter_mut().enumerate() {
                        let f = comps[b];
                        let mut acc = 0.0;
                        for (c, &(p, q)) in weights.iter().zip(&st) {
                            acc += c * (f[p] - f[q]);
                        }
                        *out = acc / h[axis];
                    }
                }
                if !ok {
                    continue;
                }
                valid[idx] = true;
                div[idx] = d[0][0] + d[1][1] + d[2][2];
                let x = xi.xi.at(idx);
                let curv = [0, 1, 2].map(|b| x[0] * d[0][b] + x[1] * d[1][b] + x[2] * d[2][b]);
                let kap = (curv[0] * curv[0] + curv[1] * curv[1] + curv[2] * curv[2]).sqrt();
                kappa[idx] = kap;
                if kap >= kappa_floor {
                    for b in 0..3 {
                        normal[b][idx] = curv[b] / kap;
                    }
                }
            }
        }
    }

    DirectionDerivatives {
        div_xi: ScalarField3::from_vec_unchecked(grid, div),
        kappa: ScalarField3::from_vec_unchecked(grid, kappa),
        normal: VectorField3::from_components_unchecked(grid, normal),
        valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_vorticity_direction() {
        let g = Grid3::cube(8).unwrap();
        let w = VectorField3::from_fn(g, |_| [0.0, 0.0, 5.0]);
        let xi = unit_vorticity(&w, 1e-8).unwrap();
        assert!(xi.valid.iter().all(|&v| v));
        for idx in 0..g.len() {
            assert_eq!(xi.xi.at(idx), [0.0, 0.0, 1.0]);
        }
        let dd = direction_derivative_fields(&xi);
        assert!(dd.div_xi.max_abs() == 0.0 && dd.kappa.max_abs() == 0.0);
        assert!(dd.normal.max_abs() == 0.0);
    }

    #[test]
    fn zero_plane_is_masked() {
        let g = Grid3::cube(16).unwrap();
        // vanishes on the plane x = 0
        let w = VectorField3::from_fn(g, |x| [0.0, 0.0, x[0].sin()]);
        let xi = unit_vorticity(&w, 1e-8).unwrap();
        for k in 0..16 {
            for j in 0..16 {
                assert!(!xi.valid[g.index(0, j, k)]);
                assert!(xi.valid[g.index(3, j, k)]);
                assert_eq!(xi.xi.at(g.index(0, j, k)), [0.0; 3]);
            }
        }
        let dd = direction_derivative_fields(&xi);
        // stencils reaching x = 0 are invalidated
        assert!(!dd.valid[g.index(1, 0, 0)] && !dd.valid[g.index(2, 0, 0)]);
        assert!(dd.valid[g.index(3, 0, 0)]);
    }

    #[test]
    fn errors() {
        let g = Grid3::cube(4).unwrap();
        let z = VectorField3::zeros(g);
        assert!(matches!(unit_vorticity(&z, 1e-8), Err(Error::EmptyDirectionField)));
        let w = VectorField3::from_fn(g, |_| [1.0, 0.0, 0.0]);
        assert!(unit_vorticity(&w, 0.0).is_err());
        assert!(unit_vorticity(&w, 1.0).is_err());
    }
}
