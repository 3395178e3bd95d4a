use serde::{Deserialize, Serialize};

use super::verdict::CriterionVerdict;
use crate::error::{Error, Result};
use crate::quad::trapezoid;
use crate::vortex_line::{oriented_divergence, VortexLine};

/// One time of the pointwise criterion: `x` near the vorticity maximum,
/// `y` further along the same line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Sample {
    pub t: f64,
    /// `int_x^y div xi ds`
    pub div_integral: f64,
    pub omega_x: f64,
    pub omega_y: f64,
}

impl Theorem1Sample {
    /// `x` is the sample of largest `|omega|` on the line, `y` the endpoint
    /// farther along the line from it.
    pub fn from_line(t: f64, line: &VortexLine) -> Result<Self> {
        let n = line.len();
        if n < 2 {
            return Err(Error::LineTooShort(n));
        }
        let ix = line
            .samples
            .iter()
            .enumerate()
            .fold(0, |best, (k, p)| if p.omega_mag > line.samples[best].omega_mag { k } else { best });
        let div = oriented_divergence(line);
        let s = line.arc_values();
        let (iy, integral) = if n - 1 - ix >= ix {
            (n - 1, trapezoid(&s[ix..], &div[ix..]))
        } else {
            (0, -trapezoid(&s[..=ix], &div[..=ix]))
        };
        Ok(Self { t, div_integral: integral, omega_x: line.samples[ix].omega_mag, omega_y: line.samples[iy].omega_mag })
    }

    /// `|omega(x)| / |omega(y)|`
    pub fn ratio(&self) -> f64 {
        self.omega_x / self.omega_y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    #[serde(flatten)]
    pub verdict: CriterionVerdict,
    /// `[e^{-C}, e^{C}]`
    pub corridor_budget: [f64; 2],
    /// `[e^{-A}, e^{A}]`, `A` the largest measured `|int div xi|`.
    pub corridor_measured: [f64; 2],
    /// Trapezoid of `|omega(y(t))|` over the recorded times.
    pub omega_y_integral: f64,
    pub ratios: Vec<f64>,
}

/// Checks `|int_x^y div xi| <= c_budget` at every time, finiteness of
/// `int |omega(y(t))| dt`, and that every `|omega(x)|/|omega(y)|` lies in
/// `[e^{-C}(1 - tau), e^{C}(1 + tau)]`.
pub fn theorem1_check(series: &[Theorem1Sample], c_budget: f64, tau: f64) -> Result<Theorem1Report> {
    if series.is_empty() {
        return Err(Error::Domain("empty line diagnostics series".into()));
    }
    if !(c_budget >= 0.0) {
        return Err(Error::Domain(format!("budget C = {c_budget} must be non-negative")));
    }
    let mut v = CriterionVerdict::new();

    let worst = series.iter().map(|s| s.div_integral.abs()).fold(0.0, f64::max);
    v.margin("div_integral_budget", c_budget - worst);
    if !(worst <= c_budget) {
        v.fail("div_integral_budget");
    }

    let t: Vec<f64> = series.iter().map(|s| s.t).collect();
    let wy: Vec<f64> = series.iter().map(|s| s.omega_y).collect();
    let integral = if series.len() > 1 { trapezoid(&t, &wy) } else { 0.0 };
    v.margin("omega_y_integral", integral);
    if !integral.is_finite() {
        v.fail("omega_y_integrable");
    }

    let ratios: Vec<f64> = series.iter().map(Theorem1Sample::ratio).collect();
    let lo = (-c_budget).exp() * (1.0 - tau);
    let hi = c_budget.exp() * (1.0 + tau);
    let slack = ratios.iter().map(|r| (r / lo - 1.0).min(1.0 - r / hi)).fold(f64::INFINITY, f64::min);
    v.margin("ratio_corridor", slack);
    if !(slack >= 0.0) {
        v.fail("ratio_corridor");
    }
    if series.len() == 1 {
        v.note("single time: the time integral is not tested");
    }
    Ok(Theorem1Report {
        verdict: v,
        corridor_budget: [(-c_budget).exp(), c_budget.exp()],
        corridor_measured: [(-worst).exp(), worst.exp()],
        omega_y_integral: integral,
        ratios,
    })
}
