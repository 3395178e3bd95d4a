use serde::{Deserialize, Serialize};

use super::fields::oriented_divergence;
use super::VortexLine;
use crate::error::{Error, Result};
use crate::quad::{cumulative_corrected_trapezoid, cumulative_trapezoid};

/// Residual of `|omega(s)| = |omega(s_0)| exp(-int_0^s div xi ds)` along a line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// Max over samples of the relative residual, end-corrected quadrature.
    pub max_rel_residual: f64,
    /// Same with the plain composite trapezoid.
    pub trapezoid_rel_residual: f64,
    /// `|omega(s_k)| / |omega(s_0)|`.
    pub ratios: Vec<f64>,
    /// `exp(-int_0^{s_k} div xi ds)`.
    pub predicted: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn check_lemma1(line: &VortexLine) -> Result<Lemma1Report> {
    if line.len() < 2 {
        return Err(Error::LineTooShort(line.len()));
    }
    if let Some((index, p)) = line.samples.iter().enumerate().find(|(_, p)| !(p.omega_mag > 0.0)) {
        return Err(Error::LineLeavesN { index, value: p.omega_mag });
    }
    let s = line.arc_values();
    let div = oriented_divergence(line);
    let corrected = cumulative_corrected_trapezoid(&s, &div);
    let plain = cumulative_trapezoid(&s, &div);
    let w0 = line.samples[0].omega_mag;

    let rel = |integral: &[f64]| -> Vec<f64> {
        line.samples
            .iter()
            .zip(integral)
            .map(|(p, i)| (p.omega_mag - w0 * (-i).exp()).abs() / p.omega_mag)
            .collect()
    };
    let residuals = rel(&corrected);
    let plain_res = rel(&plain);
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(Lemma1Report {
        max_rel_residual: max(&residuals),
        trapezoid_rel_residual: max(&plain_res),
        ratios: line.samples.iter().map(|p| p.omega_mag / w0).collect(),
        predicted: corrected.iter().map(|i| (-i).exp()).collect(),
        residuals,
    })
}

/// Whether every `|omega(s_k)|/|omega(s_0)|` lies in
/// `[e^{-A_k}(1 - tau), e^{A_k}(1 + tau)]`, `A_k = int_0^{s_k} |div xi| ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorReport {
    pub within: bool,
    pub tau: f64,
    /// Indices of samples outside the corridor.
    pub violations: Vec<usize>,
    /// Smallest relative distance to either corridor edge (negative when outside).
    pub worst_margin: f64,
    pub abs_integrals: Vec<f64>,
}

pub fn corridor_check(line: &VortexLine, tau: f64) -> Result<CorridorReport> {
    if line.len() < 2 {
        return Err(Error::LineTooShort(line.len()));
    }
    if !(tau >= 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau = {tau} must lie in [0, 1)")));
    }
    let w0 = line.samples[0].omega_mag;
    if !(w0 > 0.0) {
        return Err(Error::LineLeavesN { index: 0, value: w0 });
    }
    let s = line.arc_values();
    let abs_div: Vec<f64> = line.samples.iter().map(|p| p.div_xi.abs()).collect();
    // same quadrature as the residual; where div xi keeps one sign the ratio
    // sits on the corridor edge, so both sides must see identical rounding
    let signed = cumulative_corrected_trapezoid(&s, &oriented_divergence(line));
    let a: Vec<f64> = cumulative_corrected_trapezoid(&s, &abs_div)
        .into_iter()
        .zip(&signed)
        .map(|(a, b)| a.max(b.abs()))
        .collect();
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    for (k, p) in line.samples.iter().enumerate() {
        let r = p.omega_mag / w0;
        let lo = (-a[k]).exp() * (1.0 - tau);
        let hi = a[k].exp() * (1.0 + tau);
        let margin = ((r - lo) / lo).min((hi - r) / hi);
        worst = worst.min(margin);
        if margin < 0.0 {
            violations.push(k);
        }
    }
    Ok(CorridorReport { within: violations.is_empty(), tau, violations, worst_margin: worst, abs_integrals: a })
}
