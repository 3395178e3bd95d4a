//! Free-space Biot–Savart velocity, its periodic spectral analogue, and the
//! cutoff-split bound `U <~ Omega^{3/5}`.
//!
//! The bound splits the kernel at radius `rho`:
//!
//! * near field, `|y| <= 2 rho`: `(1/4pi) Omega int_{|y|<=2rho} |y|^-2 dy = (1/4pi) Omega 4pi 2rho = 2 Omega rho`.
//! * far field after integrating by parts, Schwarz against `||u||_2`:
//!   `(int_{|y|>=rho} |y|^-6 dy)^{1/2} = (4pi int_rho^inf r^-4 dr)^{1/2} = (4pi/3)^{1/2} rho^{-3/2}`,
//!   and `rho^-1 (int_{|y|>=rho} |y|^-4 dy)^{1/2} = rho^-1 (4pi/rho)^{1/2} = (4pi)^{1/2} rho^{-3/2}`.
//!
//! The kernel-gradient and cutoff-derivative prefactors of the far terms
//! (`2/4pi` and `max|chi'|/4pi` for a unit-width cutoff) are both below one
//! and are taken as one, so the bound stays an upper bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{cross, VectorField3};
use crate::spectral::Spectral;

/// Fraction of the box length on each side that must be vorticity free.
const SUPPORT_MARGIN: f64 = 0.25;
const SUPPORT_TOL: f64 = 1e-10;

fn check_compact_support(omega: &VectorField3) -> Result<()> {
    let grid = *omega.grid();
    let mag = omega.magnitude();
    let peak = mag.max_abs();
    let l = grid.lengths();
    let mut edge: f64 = 0.0;
    for (idx, &m) in mag.data().iter().enumerate() {
        let (i, j, k) = grid.coords(idx);
        let p = grid.position(i, j, k);
        let near_edge = (0..3).any(|a| p[a] < SUPPORT_MARGIN * l[a] || p[a] >= (1.0 - SUPPORT_MARGIN) * l[a]);
        if near_edge {
            edge = edge.max(m);
        }
    }
    if edge > SUPPORT_TOL * peak {
        return Err(Error::NotCompactlySupported { edge, peak });
    }
    Ok(())
}

/// Midpoint sum of `(1/4pi) int y/|y|^3 x omega(x+y) dy` over grid cells,
/// without periodic images. The cell containing `x` is left out.
fn bs_sum(omega: &VectorField3, x: [f64; 3]) -> [f64; 3] {
    let grid = *omega.grid();
    let h = grid.spacing();
    let dv = grid.cell_volume();
    let mut acc = [0.0; 3];
    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.index(i, j, k);
                let w = omega.at(idx);
                if w == [0.0; 3] {
                    continue;
                }
                let p = grid.position(i, j, k);
                let y = [p[0] - x[0], p[1] - x[1], p[2] - x[2]];
                if (0..3).all(|a| y[a].abs() <= 0.5 * h[a]) {
                    continue;
                }
                let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                let inv = 1.0 / (r2 * r2.sqrt());
                let c = cross(y, w);
                for a in 0..3 {
                    acc[a] += c[a] * inv;
                }
            }
        }
    }
    acc.map(|v| v * dv / (4.0 * PI))
}

/// Free-space Biot–Savart velocity at `x` from a compactly supported `omega`.
pub fn bs_velocity(omega: &VectorField3, x: [f64; 3]) -> Result<[f64; 3]> {
    check_compact_support(omega)?;
    Ok(bs_sum(omega, x))
}

/// [`bs_velocity`] at many points, evaluated in parallel.
pub fn bs_velocity_many(omega: &VectorField3, points: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
    check_compact_support(omega)?;
    Ok(points.par_iter().map(|&x| bs_sum(omega, x)).collect())
}

/// Periodic velocity `u = curl (-Laplace)^{-1} omega`.
pub fn bs_spectral_invert(omega: &VectorField3) -> Result<VectorField3> {
    let m = omega.means();
    let tol = 1e-10 * omega.max_abs().max(f64::MIN_POSITIVE);
    if m.iter().any(|v| v.abs() > tol) {
        return Err(Error::NonzeroMean(m[0], m[1], m[2]));
    }
    let sp = Spectral::new(*omega.grid());
    let w = sp.forward_vector(omega);
    Ok(sp.inverse_vector(&sp.biot_savart_hat(&w)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSplit {
    pub rho: f64,
    pub near_term: f64,
    pub far_bs_term: f64,
    pub far_grad_term: f64,
    pub total_bound: f64,
}

/// `(4pi/3)^{1/2}`
pub fn far_bs_constant() -> f64 {
    (4.0 * PI / 3.0).sqrt()
}

/// `(4pi)^{1/2}`
pub fn far_grad_constant() -> f64 {
    (4.0 * PI).sqrt()
}

pub fn cutoff_bound(omega_max: f64, u_l2: f64, rho: f64) -> Result<CutoffSplit> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho = {rho} must be positive")));
    }
    if !(omega_max >= 0.0 && omega_max.is_finite()) {
        return Err(Error::Domain(format!("Omega = {omega_max} must be non-negative")));
    }
    if !(u_l2 >= 0.0 && u_l2.is_finite()) {
        return Err(Error::Domain(format!("u_l2 = {u_l2} must be non-negative")));
    }
    let near_term = 2.0 * omega_max * rho;
    let tail = rho.powf(-1.5);
    let far_bs_term = u_l2 * far_bs_constant() * tail;
    let far_grad_term = u_l2 * far_grad_constant() * tail;
    Ok(CutoffSplit { rho, near_term, far_bs_term, far_grad_term, total_bound: near_term + far_bs_term + far_grad_term })
}

/// `Omega^{-2/5}`, as the squared reciprocal fifth root so that exact
/// fifth powers give exact results (`-0.4` is not representable).
pub fn optimal_rho(omega_max: f64) -> Result<f64> {
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(Error::Domain(format!("Omega = {omega_max} must be positive")));
    }
    Ok(omega_max.powf(0.2).powi(-2))
}

/// Exact minimizer of `a rho + b rho^{-3/2}`, `a = 2 Omega`,
/// `b = u_l2 ((4pi/3)^{1/2} + (4pi)^{1/2})`: `(3b / 2a)^{2/5}`.
pub fn bound_minimizing_rho(omega_max: f64, u_l2: f64) -> Result<f64> {
    if !(omega_max > 0.0 && u_l2 > 0.0) {
        return Err(Error::Domain("Omega and u_l2 must be positive".into()));
    }
    let a = 2.0 * omega_max;
    let b = u_l2 * (far_bs_constant() + far_grad_constant());
    Ok((1.5 * b / a).powf(0.4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityBoundReport {
    #[serde(rename = "U_measured")]
    pub u_measured: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub u_l2: f64,
    pub rho_used: f64,
    pub bound_value: f64,
    /// `U_measured / Omega^{3/5}`
    pub ratio: f64,
    pub pass: bool,
    pub split: CutoffSplit,
}

/// Measures `max|u|` against the cutoff bound at `rho = Omega^{-2/5}`, with
/// `||u||_2` taken from `u` itself.
pub fn check_35_bound(u: &VectorField3, omega: &VectorField3) -> Result<VelocityBoundReport> {
    check_35_bound_with_l2(u, omega, u.l2_norm())
}

/// As [`check_35_bound`] with a supplied (conserved, initial) `||u||_2`.
pub fn check_35_bound_with_l2(u: &VectorField3, omega: &VectorField3, u_l2: f64) -> Result<VelocityBoundReport> {
    if u.grid() != omega.grid() {
        return Err(Error::Shape("velocity and vorticity grids differ".into()));
    }
    let u_measured = u.max_magnitude();
    let om = omega.max_magnitude();
    let rho = optimal_rho(om)?;
    let split = cutoff_bound(om, u_l2, rho)?;
    Ok(VelocityBoundReport {
        u_measured,
        omega: om,
        u_l2,
        rho_used: rho,
        bound_value: split.total_bound,
        ratio: u_measured / om.powf(0.6),
        pass: u_measured <= split.total_bound,
        split,
    })
}
