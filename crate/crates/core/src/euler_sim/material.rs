use serde::{Deserialize, Serialize};

use super::particles::{advect_points, VelocityProvider};
use crate::error::{Error, Result};
use crate::field::{dot, norm, VectorField3};
use crate::interp::{sample_vector, Interpolation};
use crate::quad::cumulative_trapezoid;
use crate::vortex_line::{summarize, LineFields, VortexLine, LINE_INTERP};

pub const DEFAULT_MARKERS: usize = 129;
/// Segment stretch or shrink factor past which the markers no longer resolve the line.
pub const SPACING_WARN_FACTOR: f64 = 10.0;

/// Lagrangian markers on a vortex line, labelled by arc length at `t1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialLine {
    pub alpha_points: Vec<[f64; 3]>,
    pub current_points: Vec<[f64; 3]>,
    pub t1: f64,
    pub t: f64,
    /// Cumulative polyline length of `alpha_points`.
    pub beta: Vec<f64>,
    /// Set once a segment has stretched or shrunk past [`SPACING_WARN_FACTOR`].
    pub warning: bool,
}

fn cumulative_length(points: &[[f64; 3]]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in points.windows(2) {
        acc += norm([w[1][0] - w[0][0], w[1][1] - w[0][1], w[1][2] - w[0][2]]);
        out.push(acc);
    }
    out
}

impl MaterialLine {
    pub fn new(points: Vec<[f64; 3]>, t1: f64) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::LineTooShort(points.len()));
        }
        let beta = cumulative_length(&points);
        if beta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("coincident markers".into()));
        }
        Ok(Self { current_points: points.clone(), alpha_points: points, t1, t: t1, beta, warning: false })
    }

    /// `markers` points at uniform arc length along a traced line, by 4-point
    /// Lagrange interpolation in `s`.
    pub fn from_vortex_line(line: &VortexLine, markers: usize, t1: f64) -> Result<Self> {
        if line.len() < 4 {
            return Err(Error::LineTooShort(line.len()));
        }
        if markers < 3 {
            return Err(Error::Config(format!("{markers} markers; need at least 3")));
        }
        let n = line.len();
        let h = line.step;
        let s_end = line.samples[n - 1].s;
        let points = (0..markers)
            .map(|j| {
                let s = s_end * j as f64 / (markers - 1) as f64;
                let q = (s / h).clamp(0.0, (n - 1) as f64);
                let first = (q.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
                let t = q - first as f64;
                let mut x = [0.0; 3];
                for a in 0..4 {
                    let mut w = 1.0;
                    for b in 0..4 {
                        if a != b {
                            w *= (t - b as f64) / (a as f64 - b as f64);
                        }
                    }
                    let p = line.samples[first + a].position;
                    for d in 0..3 {
                        x[d] += w * p[d];
                    }
                }
                x
            })
            .collect();
        Self::new(points, t1)
    }

    pub fn len(&self) -> usize {
        self.current_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.current_points.is_empty()
    }

    pub fn initial_length(&self) -> f64 {
        *self.beta.last().expect("non-empty")
    }

    /// Polyline length of the current markers.
    pub fn length(&self) -> f64 {
        *cumulative_length(&self.current_points).last().expect("non-empty")
    }

    /// `ds/dbeta` per marker: centered differences of the two cumulative
    /// lengths, second-order one-sided at the ends.
    pub fn s_beta(&self) -> Vec<f64> {
        let s = cumulative_length(&self.current_points);
        let b = &self.beta;
        let n = s.len();
        (0..n)
            .map(|i| {
                if i == 0 {
                    (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (-3.0 * b[0] + 4.0 * b[1] - b[2])
                } else if i == n - 1 {
                    (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (3.0 * b[n - 1] - 4.0 * b[n - 2] + b[n - 3])
                } else {
                    (s[i + 1] - s[i - 1]) / (b[i + 1] - b[i - 1])
                }
            })
            .collect()
    }

    /// Whether a segment has stretched or shrunk past [`SPACING_WARN_FACTOR`].
    pub fn spacing_degraded(&self) -> bool {
        let now = cumulative_length(&self.current_points);
        now.windows(2).zip(self.beta.windows(2)).any(|(a, b)| {
            let r = (a[1] - a[0]) / (b[1] - b[0]);
            r > SPACING_WARN_FACTOR || r < 1.0 / SPACING_WARN_FACTOR
        })
    }
}

/// Carries every marker from `line.t` to `t2`. Markers are never resampled.
pub fn track_material_line<P: VelocityProvider + ?Sized>(
    line: &MaterialLine,
    provider: &P,
    t2: f64,
    dt: f64,
) -> Result<MaterialLine> {
    let mut out = line.clone();
    out.current_points = advect_points(provider, &line.current_points, line.t, t2, dt)?;
    out.t = t2;
    out.warning |= out.spacing_degraded();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Markers with vanishing vorticity at either time.
    pub excluded: Vec<usize>,
    pub s_beta: Vec<f64>,
    /// `|omega(X, t)| / |omega(alpha, t1)|`
    pub ratios: Vec<f64>,
    /// `|s_beta - ratio| / s_beta`, NaN for excluded markers.
    pub residuals: Vec<f64>,
}

/// Marker magnitudes below this fraction of the field maximum count as zero.
const ZERO_OMEGA_REL: f64 = 1e-8;

/// Arc-length stretching against the vorticity magnitude ratio per marker.
pub fn check_lemma2(line: &MaterialLine, omega_t1: &VectorField3, omega_t2: &VectorField3) -> Result<Lemma2Report> {
    let s_beta = line.s_beta();
    let floor1 = ZERO_OMEGA_REL * omega_t1.max_magnitude();
    let floor2 = ZERO_OMEGA_REL * omega_t2.max_magnitude();
    let mut excluded = Vec::new();
    let mut ratios = Vec::with_capacity(line.len());
    let mut residuals = Vec::with_capacity(line.len());
    for (i, (a, x)) in line.alpha_points.iter().zip(&line.current_points).enumerate() {
        let w1 = norm(sample_vector(omega_t1, *a, LINE_INTERP));
        let w2 = norm(sample_vector(omega_t2, *x, LINE_INTERP));
        if !(w1 > floor1 && w2 > floor2) {
            excluded.push(i);
            ratios.push(f64::NAN);
            residuals.push(f64::NAN);
            continue;
        }
        let r = w2 / w1;
        ratios.push(r);
        residuals.push((s_beta[i] - r).abs() / s_beta[i]);
    }
    let kept: Vec<f64> = residuals.iter().copied().filter(|v| !v.is_nan()).collect();
    if kept.is_empty() {
        return Err(Error::LineLeavesN { index: 0, value: 0.0 });
    }
    Ok(Lemma2Report {
        max_residual: kept.iter().copied().fold(0.0, f64::max),
        mean_residual: kept.iter().sum::<f64>() / kept.len() as f64,
        excluded,
        s_beta,
        ratios,
        residuals,
    })
}

/// Line quantities of a material line at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSnapshot {
    pub t: f64,
    pub length: f64,
    /// `max(max |div xi|, max kappa)` over the markers.
    pub m: f64,
    /// Spread of `u . xi` over the markers.
    pub u_xi: f64,
    /// `|u.xi(end) - u.xi(start)|`
    pub u_xi_ends: f64,
    pub u_n: f64,
    pub omega_markers: Vec<f64>,
}

impl LineSnapshot {
    pub fn omega_max(&self) -> f64 {
        self.omega_markers.iter().copied().fold(0.0, f64::max)
    }
}

/// Measures a material line against grid fields (built with velocity).
pub fn line_snapshot(line: &MaterialLine, fields: &LineFields) -> Result<LineSnapshot> {
    let poly = fields.line_through_points(&line.current_points)?;
    let d = summarize(&poly)?;
    let first = poly.samples[0].u_tan;
    let last = poly.samples[poly.len() - 1].u_tan;
    Ok(LineSnapshot {
        t: line.t,
        length: line.length(),
        m: d.m_line,
        u_xi: d.u_xi_line,
        u_xi_ends: (last - first).abs(),
        u_n: d.u_n_line,
        omega_markers: poly.samples.iter().map(|p| p.omega_mag).collect(),
    })
}

pub const STRETCHING_TOLERANCE: f64 = 1.01;

/// Both sides of the stretching inequalities at one time against the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchingRow {
    pub t: f64,
    pub length_ratio: f64,
    /// `M(t) l(t) + M(t1) l(t1)`
    pub exponent: f64,
    /// `l(t)/l(t1)` over the largest `e^{-E} ratio`; at least one when the lower side holds.
    pub lower_margin: f64,
    /// Smallest `e^{E} ratio` over `l(t)/l(t1)`.
    pub upper_margin: f64,
    /// Largest `|l(t)/l(t1) / ratio - 1|` over markers.
    pub lemma2_gap: f64,
    pub omega_l: f64,
    /// Right side of the vorticity growth bound.
    pub omega_l_bound: f64,
    /// Right side of the length growth bound.
    pub length_bound: f64,
    pub holds_omega: bool,
    pub holds_growth: bool,
    pub holds_length: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchingReport {
    pub pass: bool,
    pub tolerance: f64,
    pub c: f64,
    pub rows: Vec<StretchingRow>,
}

/// Checks the per-marker length/vorticity corridor, the vorticity growth
/// bound with constant `c`, and the length growth bound for every snapshot
/// against the first. Time integrals by trapezoid over the history.
pub fn check_stretching_inequalities(history: &[LineSnapshot], c: f64) -> Result<StretchingReport> {
    let first = history.first().ok_or(Error::LineTooShort(0))?;
    if history.iter().any(|h| h.omega_markers.len() != first.omega_markers.len()) {
        return Err(Error::Shape("marker count changes over the history".into()));
    }
    let t: Vec<f64> = history.iter().map(|h| h.t).collect();
    let growth_rate: Vec<f64> = history.iter().map(|h| h.u_xi + h.m * h.u_n * h.length).collect();
    let growth_int = cumulative_trapezoid(&t, &growth_rate);
    let ends_int = cumulative_trapezoid(&t, &history.iter().map(|h| h.u_xi_ends).collect::<Vec<_>>());
    let normal_int = cumulative_trapezoid(&t, &history.iter().map(|h| h.m * h.u_n * h.length).collect::<Vec<_>>());
    let tol = STRETCHING_TOLERANCE;
    let l1 = first.length;
    let om1 = first.omega_max();

    let rows: Vec<StretchingRow> = history
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let lr = h.length / l1;
            let e = h.m * h.length + first.m * l1;
            let ratios: Vec<f64> = h.omega_markers.iter().zip(&first.omega_markers).map(|(a, b)| a / b).collect();
            let lo = ratios.iter().map(|r| (-e).exp() * r).fold(f64::NEG_INFINITY, f64::max);
            let hi = ratios.iter().map(|r| e.exp() * r).fold(f64::INFINITY, f64::min);
            let gap = ratios.iter().map(|r| (lr / r - 1.0).abs()).fold(0.0, f64::max);
            let omega_l = h.omega_max();
            let omega_l_bound = e.exp() * om1 * (1.0 + c / l1 * growth_int[k]);
            let length_bound = l1 + ends_int[k] + normal_int[k];
            StretchingRow {
                t: h.t,
                length_ratio: lr,
                exponent: e,
                lower_margin: lr / lo,
                upper_margin: hi / lr,
                lemma2_gap: gap,
                omega_l,
                omega_l_bound,
                length_bound,
                holds_omega: lo <= tol * lr && lr <= tol * hi,
                holds_growth: omega_l <= tol * omega_l_bound,
                holds_length: h.length <= tol * length_bound,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.holds_omega && r.holds_growth && r.holds_length);
    Ok(StretchingReport { pass, tolerance: tol, c, rows })
}

/// `oint u . dX` over a closed material loop of markers, with `dX/dtheta`
/// from sixth-order periodic differences in the marker index.
pub fn circulation(points: &[[f64; 3]], u: &VectorField3, interp: Interpolation) -> Result<f64> {
    let n = points.len();
    if n < 7 {
        return Err(Error::LineTooShort(n));
    }
    const C: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    let mut acc = 0.0;
    for i in 0..n {
        let mut d = [0.0; 3];
        for (m, c) in C.iter().enumerate() {
            let p = points[(i + m + 1) % n];
            let q = points[(i + n - m - 1) % n];
            for a in 0..3 {
                d[a] += c * (p[a] - q[a]);
            }
        }
        acc += dot(sample_vector(u, points[i], interp), d);
    }
    Ok(acc)
}
