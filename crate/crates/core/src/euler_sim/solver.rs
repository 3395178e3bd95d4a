use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::VectorField3;
use crate::grid::Grid3;
use crate::spectral::{Spectral, Spectrum};

pub const DEFAULT_CFL: f64 = 0.5;

/// Velocity in spectral form at one instant.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u_hat: [Spectrum; 3],
    pub grid: Grid3,
    pub dealias_mask: Arc<Vec<bool>>,
}

/// Pseudo-spectral Euler stepper: RK4 on `u_t = P[u x omega]`, 2/3-rule
/// truncation, Leray projection at every stage.
#[derive(Debug, Clone)]
pub struct EulerSolver {
    sp: Arc<Spectral>,
    mask: Arc<Vec<bool>>,
    pub cfl: f64,
    /// Exponential high-k filter after each step; off unless asked for.
    pub filter: bool,
}

impl EulerSolver {
    pub fn new(grid: Grid3) -> Self {
        let sp = Spectral::new(grid);
        let mask = sp.dealias_mask();
        Self { sp: Arc::new(sp), mask: Arc::new(mask), cfl: DEFAULT_CFL, filter: false }
    }

    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }

    pub fn grid(&self) -> &Grid3 {
        self.sp.grid()
    }

    /// Truncates and projects `u` into the state space.
    pub fn init(&self, u: &VectorField3, t: f64) -> Result<SimState> {
        if u.grid() != self.grid() {
            return Err(Error::Shape("initial field grid differs from solver grid".into()));
        }
        let mut u_hat = self.sp.forward_vector(u);
        self.truncate(&mut u_hat);
        self.sp.project_hat(&mut u_hat);
        Ok(SimState { t, u_hat, grid: *self.grid(), dealias_mask: self.mask.clone() })
    }

    fn truncate(&self, v: &mut [Spectrum; 3]) {
        let zero = Complex64::new(0.0, 0.0);
        for (idx, keep) in self.mask.iter().enumerate() {
            if !keep {
                for c in v.iter_mut() {
                    c[idx] = zero;
                }
            }
        }
    }

    pub fn velocity(&self, s: &SimState) -> VectorField3 {
        self.sp.inverse_vector(&s.u_hat)
    }

    pub fn vorticity(&self, s: &SimState) -> VectorField3 {
        self.sp.inverse_vector(&self.sp.curl_hat(&s.u_hat))
    }

    pub fn energy(&self, s: &SimState) -> f64 {
        self.sp.energy_hat(&s.u_hat)
    }

    /// `integral u . omega`.
    pub fn helicity(&self, s: &SimState) -> f64 {
        self.velocity(s).inner(&self.vorticity(s))
    }

    /// Largest stable step for the current velocity.
    pub fn cfl_limit(&self, s: &SimState) -> f64 {
        let umax = self.velocity(s).max_magnitude();
        if umax == 0.0 {
            f64::INFINITY
        } else {
            self.cfl * self.grid().min_spacing() / umax
        }
    }

    /// `P[u x omega]`, truncated. Also returns `max |u|`.
    fn rhs(&self, u_hat: &[Spectrum; 3]) -> ([Spectrum; 3], f64) {
        let u = self.sp.inverse_vector(u_hat);
        let w = self.sp.inverse_vector(&self.sp.curl_hat(u_hat));
        let [u0, u1, u2] = u.components();
        let [w0, w1, w2] = w.components();
        let n = u0.len();
        let mut nl = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut umax2: f64 = 0.0;
        for i in 0..n {
            nl[0][i] = u1[i] * w2[i] - u2[i] * w1[i];
            nl[1][i] = u2[i] * w0[i] - u0[i] * w2[i];
            nl[2][i] = u0[i] * w1[i] - u1[i] * w0[i];
            umax2 = umax2.max(u0[i] * u0[i] + u1[i] * u1[i] + u2[i] * u2[i]);
        }
        let mut out = nl.map(|c| self.sp.forward(&c));
        self.truncate(&mut out);
        self.sp.project_hat(&mut out);
        (out, umax2.sqrt())
    }

    /// One RK4 step. Fails without stepping when `dt` breaks the CFL limit.
    pub fn step(&self, s: &SimState, dt: f64) -> Result<SimState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("dt = {dt} must be positive")));
        }
        let (k1, umax) = self.rhs(&s.u_hat);
        if umax > 0.0 {
            let limit = self.cfl * self.grid().min_spacing() / umax;
            if dt > limit {
                return Err(Error::Cfl { dt, limit, suggested: 0.9 * limit });
            }
        }
        let stage = |k: &[Spectrum; 3], f: f64| -> [Spectrum; 3] {
            [0, 1, 2].map(|d| s.u_hat[d].iter().zip(&k[d]).map(|(u, k)| u + k * f).collect())
        };
        let (k2, _) = self.rhs(&stage(&k1, dt / 2.0));
        let (k3, _) = self.rhs(&stage(&k2, dt / 2.0));
        let (k4, _) = self.rhs(&stage(&k3, dt));
        let mut u_hat = [0, 1, 2].map(|d| {
            (0..s.u_hat[d].len())
                .map(|i| s.u_hat[d][i] + (k1[d][i] + 2.0 * k2[d][i] + 2.0 * k3[d][i] + k4[d][i]) * (dt / 6.0))
                .collect::<Spectrum>()
        });
        if self.filter {
            self.apply_filter(&mut u_hat);
        }
        Ok(SimState { t: s.t + dt, u_hat, grid: s.grid, dealias_mask: s.dealias_mask.clone() })
    }

    /// `exp(-36 (k/k_max)^36)` per axis-scaled mode.
    fn apply_filter(&self, v: &mut [Spectrum; 3]) {
        let g = *self.grid();
        let half = [g.nx / 2, g.ny / 2, g.nz / 2].map(|n| n as f64);
        for idx in 0..self.sp.spectral_len() {
            let m = self.sp.modes(idx);
            let r = (0..3).map(|a| m[a] as f64 / half[a]).fold(0.0f64, |acc, x| acc.max(x.abs()));
            let f = (-36.0 * r.powi(36)).exp();
            for c in v.iter_mut() {
                c[idx] *= f;
            }
        }
    }

    /// `max |k . u_hat(k)| / (|k| max |u_hat|)` over all modes. Normalized
    /// by the largest mode rather than per mode: modes at round-off amplitude
    /// have no meaningful direction.
    pub fn spectral_divergence(&self, s: &SimState) -> f64 {
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for idx in 0..self.sp.spectral_len() {
            let k = self.sp.wavevector(idx);
            let u = [s.u_hat[0][idx], s.u_hat[1][idx], s.u_hat[2][idx]];
            peak = peak.max((u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt());
            let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            if kn > 0.0 {
                worst = worst.max((u[0] * k[0] + u[1] * k[1] + u[2] * k[2]).norm() / kn);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            worst / peak
        }
    }
}
