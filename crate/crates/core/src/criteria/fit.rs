use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler_sim::{DiagnosticsTimeline, TimelineRow};

pub const MIN_FIT_ROWS: usize = 8;
/// Relative offsets of the `T_est` sensitivity grid.
pub const T_GRID: [f64; 5] = [-0.05, -0.025, 0.0, 0.025, 0.05];
/// Relative `Omega` growth across the window below which a fit is noise.
pub const FLAT_GROWTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub value: f64,
    /// Standard error of the least-squares slope.
    pub stderr: f64,
    /// Range over the `T_est` grid.
    pub band: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub t_est: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
    pub rows_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub t_est: f64,
    pub alpha_hat: ExponentFit,
    pub beta_hat: ExponentFit,
    pub gamma_hat: ExponentFit,
    pub sensitivity: Vec<SensitivityRow>,
    pub inconclusive: bool,
    pub notes: String,
}

/// Slope and its standard error for `y ~ a + b x`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    let se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (b, se)
}

fn growth_quantity(r: &TimelineRow) -> f64 {
    r.u_xi + r.u_n * r.m_line * r.l_line
}

/// Window: rows with `t < t_est`, final half.
fn window(tl: &DiagnosticsTimeline, t_est: f64) -> Vec<TimelineRow> {
    let rows: Vec<TimelineRow> = tl.rows.iter().copied().filter(|r| r.t < t_est).collect();
    let start = rows.len() / 2;
    rows[start..].to_vec()
}

/// `(alpha, beta, gamma)` with standard errors, NaN where a quantity is not
/// positive.
fn fit_once(rows: &[TimelineRow], t_est: f64) -> [(f64, f64); 3] {
    let x: Vec<f64> = rows.iter().map(|r| (t_est - r.t).ln()).collect();
    let slope = |f: &dyn Fn(&TimelineRow) -> f64| -> (f64, f64) {
        let y: Vec<f64> = rows.iter().map(|r| f(r).ln()).collect();
        if y.iter().any(|v| !v.is_finite()) {
            return (f64::NAN, f64::NAN);
        }
        least_squares(&x, &y)
    };
    let (a, sa) = slope(&growth_quantity);
    let (b, sb) = slope(&|r| r.l_line);
    let (g, sg) = slope(&|r| r.omega);
    [(-a, sa), (b, sb), (-g, sg)]
}

/// Power-law exponents from log-log least squares against `T_est - t` over
/// the final half of the rows before `T_est`: `gamma` from `Omega`, `beta`
/// from `L`, `alpha` from `U_xi + U_n M L`.
pub fn fit_scaling(tl: &DiagnosticsTimeline, t_est: f64) -> Result<ScalingFit> {
    let before = tl.rows.iter().filter(|r| r.t < t_est).count();
    if before < MIN_FIT_ROWS {
        return Err(Error::Domain(format!("{before} rows before T_est = {t_est}; need at least {MIN_FIT_ROWS}")));
    }
    let rows = window(tl, t_est);
    let [a, b, g] = fit_once(&rows, t_est);

    let mut notes = Vec::new();
    let mut inconclusive = false;
    if rows.windows(2).any(|w| !(w[1].omega > w[0].omega)) {
        inconclusive = true;
        notes.push("Omega not strictly increasing over the fit window".to_string());
    }
    let (w0, w1) = (rows[0].omega, rows[rows.len() - 1].omega);
    if !((w1 - w0) > FLAT_GROWTH * w0.abs()) {
        inconclusive = true;
        notes.push(format!("Omega grows by less than {FLAT_GROWTH:e} relative over the window; exponents reflect noise"));
    }
    if [a.0, b.0, g.0].iter().any(|v| !v.is_finite()) {
        inconclusive = true;
        notes.push("non-positive or missing values in a fitted quantity".to_string());
    }

    let last_t = tl.rows.iter().filter(|r| r.t < t_est).map(|r| r.t).fold(f64::NEG_INFINITY, f64::max);
    let mut sensitivity = Vec::new();
    for off in T_GRID {
        let t = t_est * (1.0 + off);
        if tl.rows.iter().filter(|r| r.t < t).count() < MIN_FIT_ROWS || t <= last_t && off < 0.0 {
            continue;
        }
        let w = window(tl, t);
        let [sa, sb, sg] = fit_once(&w, t);
        sensitivity.push(SensitivityRow { t_est: t, alpha_hat: sa.0, beta_hat: sb.0, gamma_hat: sg.0, rows_used: w.len() });
    }
    let band = |f: &dyn Fn(&SensitivityRow) -> f64| -> [f64; 2] {
        let vals: Vec<f64> = sensitivity.iter().map(f).collect();
        [vals.iter().copied().fold(f64::INFINITY, f64::min), vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)]
    };
    Ok(ScalingFit {
        t_est,
        alpha_hat: ExponentFit { value: a.0, stderr: a.1, band: band(&|r| r.alpha_hat) },
        beta_hat: ExponentFit { value: b.0, stderr: b.1, band: band(&|r| r.beta_hat) },
        gamma_hat: ExponentFit { value: g.0, stderr: g.1, band: band(&|r| r.gamma_hat) },
        sensitivity,
        inconclusive,
        notes: notes.join("; "),
    })
}
