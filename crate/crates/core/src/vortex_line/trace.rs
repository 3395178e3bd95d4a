use serde::{Deserialize, Serialize};

use super::{LineSample, Termination, VortexLine};
use crate::direction::MaskedDirectionField;
use crate::error::{Error, Result};
use crate::field::{dot, norm, scale};
use crate::interp::{sample_vector, stencil_valid, Interpolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// Anything that yields a unit vortex direction at a point.
pub trait DirectionSource {
    /// Unit direction at `x`, `None` outside the region where it is defined.
    fn direction(&self, x: [f64; 3]) -> Option<[f64; 3]>;

    /// Box lengths when the source is periodic; used for loop closure.
    fn period(&self) -> Option<[f64; 3]> {
        None
    }

    /// Largest admissible arc-length step.
    fn max_step(&self) -> f64 {
        f64::INFINITY
    }
}

fn normalized(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| scale(v, 1.0 / n))
}

impl DirectionSource for MaskedDirectionField {
    fn direction(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        if !stencil_valid(self.grid(), &self.valid, x, Interpolation::Tricubic) {
            return None;
        }
        normalized(sample_vector(&self.xi, x, Interpolation::Tricubic))
    }

    fn period(&self) -> Option<[f64; 3]> {
        Some(self.grid().lengths())
    }

    fn max_step(&self) -> f64 {
        self.grid().min_spacing() / 2.0
    }
}

/// Direction given by a closed-form function (normalized on evaluation).
pub struct AnalyticDirection<F> {
    f: F,
    period: Option<[f64; 3]>,
}

impl<F: Fn([f64; 3]) -> [f64; 3]> AnalyticDirection<F> {
    pub fn new(f: F) -> Self {
        Self { f, period: None }
    }

    pub fn periodic(f: F, period: [f64; 3]) -> Self {
        Self { f, period: Some(period) }
    }
}

impl<F: Fn([f64; 3]) -> [f64; 3]> DirectionSource for AnalyticDirection<F> {
    fn direction(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        normalized((self.f)(x))
    }

    fn period(&self) -> Option<[f64; 3]> {
        self.period
    }
}

fn displacement(period: Option<[f64; 3]>, from: [f64; 3], to: [f64; 3]) -> [f64; 3] {
    let mut d = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
    if let Some(l) = period {
        for a in 0..3 {
            d[a] -= l[a] * (d[a] / l[a]).round();
        }
    }
    d
}

/// Traces a vortex line through a masked grid direction field.
pub fn trace_line(
    xi: &MaskedDirectionField,
    seed: [f64; 3],
    max_length: f64,
    step: f64,
    direction: Direction,
) -> Result<VortexLine> {
    trace_source(xi, seed, max_length, step, direction)
}

/// Classical RK4 on `dX/ds = xi(X)` with the direction renormalized at every
/// stage. The step is shrunk so that `max_length` is a whole number of steps.
pub fn trace_source<S: DirectionSource + ?Sized>(
    src: &S,
    seed: [f64; 3],
    max_length: f64,
    step: f64,
    direction: Direction,
) -> Result<VortexLine> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain(format!("step {step} must be positive")));
    }
    if step > src.max_step() * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "step {step} exceeds half the minimum grid spacing ({})",
            src.max_step()
        )));
    }
    if !(max_length > 0.0 && max_length.is_finite()) {
        return Err(Error::Domain(format!("max_length {max_length} must be positive")));
    }
    let xi0 = src.direction(seed).ok_or(Error::SeedOutsideMask)?;
    let n_steps = ((max_length / step) - 1e-9).ceil().max(1.0) as usize;
    let h = max_length / n_steps as f64;
    let sign = direction.sign();
    let period = src.period();

    let rhs = |x: [f64; 3]| src.direction(x).map(|d| scale(d, sign));
    let mut samples = vec![LineSample { position: seed, s: 0.0, xi: xi0, ..Default::default() }];
    let mut x = seed;
    let mut left_seed = false;
    let mut reason = Termination::MaxLength;
    let mut length = max_length;

    for k in 0..n_steps {
        let next = (|| {
            let k1 = rhs(x)?;
            let k2 = rhs(add_scaled(x, k1, h / 2.0))?;
            let k3 = rhs(add_scaled(x, k2, h / 2.0))?;
            let k4 = rhs(add_scaled(x, k3, h))?;
            let inc = [0, 1, 2].map(|a| h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]));
            let y = [x[0] + inc[0], x[1] + inc[1], x[2] + inc[2]];
            Some((y, src.direction(y)?))
        })();
        let Some((y, xi_y)) = next else {
            reason = Termination::LeftValidMask;
            length = k as f64 * h;
            break;
        };

        let s_here = k as f64 * h;
        if left_seed {
            // closest approach of segment x -> y to the seed
            let seg = displacement(period, x, y);
            let to_seed = displacement(period, x, seed);
            let seg_len2 = dot(seg, seg);
            let t = dot(to_seed, seg) / seg_len2;
            let miss = [0, 1, 2].map(|a| to_seed[a] - t * seg[a]);
            let xi_here = samples.last().map(|p| p.xi).unwrap_or(xi0);
            if (0.0..1.0).contains(&t) && norm(miss) < h / 2.0 && dot(xi_here, xi0) > 0.99 {
                reason = Termination::ClosedLoop;
                length = s_here + t * h;
                break;
            }
        } else if norm(displacement(period, seed, y)) > 2.0 * h {
            left_seed = true;
        }

        x = y;
        samples.push(LineSample { position: y, s: (k + 1) as f64 * h, xi: xi_y, ..Default::default() });
    }

    Ok(VortexLine { samples, step: h, seed, terminated_reason: reason, length })
}

#[inline]
fn add_scaled(x: [f64; 3], d: [f64; 3], f: f64) -> [f64; 3] {
    [x[0] + f * d[0], x[1] + f * d[1], x[2] + f * d[2]]
}
