use super::trace::{trace_source, Direction, DirectionSource};
use super::{LineDiagnostics, LineSample, Termination, VortexLine};
use crate::direction::{
    direction_derivative_fields_with, unit_vorticity, DirectionDerivatives, FdOrder, MaskedDirectionField,
    DEFAULT_EPS_REL, DEFAULT_KAPPA_FLOOR,
};
use crate::error::{Error, Result};
use crate::field::{dot, norm, scale, VectorField3};
use crate::interp::{sample_scalar, sample_vector, stencil_valid, Interpolation};
use crate::quad::cumulative_trapezoid;

/// Along-line sampling; 6-point so interpolation error stays below the
/// stencil error of the derivative fields.
pub const LINE_INTERP: Interpolation = Interpolation::Quintic;

/// Grid fields needed along a line, computed once per snapshot.
#[derive(Debug, Clone)]
pub struct LineFields {
    omega: VectorField3,
    u: Option<VectorField3>,
    xi: MaskedDirectionField,
    deriv: DirectionDerivatives,
    /// `kappa * n`, interpolated instead of `n` so the sign flips of `n` near
    /// straight segments do not smear.
    curvature: VectorField3,
    kappa_floor: f64,
    interp: Interpolation,
}

impl LineFields {
    pub fn new(omega: &VectorField3, u: Option<&VectorField3>) -> Result<Self> {
        Self::with_options(omega, u, DEFAULT_EPS_REL, FdOrder::Sixth)
    }

    pub fn with_options(
        omega: &VectorField3,
        u: Option<&VectorField3>,
        eps_rel: f64,
        order: FdOrder,
    ) -> Result<Self> {
        if let Some(u) = u {
            if u.grid() != omega.grid() {
                return Err(Error::Shape("velocity and vorticity grids differ".into()));
            }
        }
        let xi = unit_vorticity(omega, eps_rel)?;
        let deriv = direction_derivative_fields_with(&xi, order, DEFAULT_KAPPA_FLOOR);
        let grid = *omega.grid();
        let [n0, n1, n2] = deriv.normal.components();
        let k = deriv.kappa.data();
        let curvature = VectorField3::from_components_unchecked(
            grid,
            [0, 1, 2].map(|d| {
                let n = [n0, n1, n2][d];
                (0..grid.len()).map(|i| k[i] * n[i]).collect()
            }),
        );
        Ok(Self {
            omega: omega.clone(),
            u: u.cloned(),
            xi,
            deriv,
            curvature,
            kappa_floor: DEFAULT_KAPPA_FLOOR,
            interp: LINE_INTERP,
        })
    }

    pub fn with_interpolation(mut self, method: Interpolation) -> Self {
        self.interp = method;
        self
    }

    pub fn direction_field(&self) -> &MaskedDirectionField {
        &self.xi
    }

    pub fn derivatives(&self) -> &DirectionDerivatives {
        &self.deriv
    }

    pub fn omega_magnitude_at(&self, x: [f64; 3]) -> f64 {
        norm(sample_vector(&self.omega, x, self.interp))
    }

    pub fn trace(&self, seed: [f64; 3], max_length: f64, step: f64, direction: Direction) -> Result<VortexLine> {
        let mut line = trace_source(self, seed, max_length, step, direction)?;
        self.annotate(&mut line);
        Ok(line)
    }

    /// Traces `length/2` each way from `seed` and joins the halves so the
    /// result runs along `+xi` with the seed in its interior. A closed loop
    /// found going forward is returned as is.
    pub fn trace_through(&self, seed: [f64; 3], length: f64, step: f64) -> Result<VortexLine> {
        let half = length / 2.0;
        let fwd = trace_source(self, seed, half, step, Direction::Forward)?;
        let mut line = if fwd.terminated_reason == Termination::ClosedLoop {
            fwd
        } else {
            let back = trace_source(self, seed, half, step, Direction::Backward)?;
            let h = fwd.step;
            let mut samples: Vec<LineSample> = back.samples.iter().rev().copied().collect();
            samples.extend(fwd.samples.iter().skip(1).copied());
            for (k, p) in samples.iter_mut().enumerate() {
                p.s = k as f64 * h;
            }
            let reason = if back.terminated_reason == Termination::LeftValidMask {
                Termination::LeftValidMask
            } else {
                fwd.terminated_reason
            };
            VortexLine {
                length: (samples.len() - 1) as f64 * h,
                samples,
                step: h,
                seed,
                terminated_reason: reason,
            }
        };
        self.annotate(&mut line);
        Ok(line)
    }

    /// Annotated polyline through given points, `s` by cumulative chord
    /// length. Used for material lines, which are not re-traced.
    pub fn line_through_points(&self, points: &[[f64; 3]]) -> Result<VortexLine> {
        if points.len() < 2 {
            return Err(Error::LineTooShort(points.len()));
        }
        let mut s = 0.0;
        let mut samples = Vec::with_capacity(points.len());
        for (k, &x) in points.iter().enumerate() {
            if k > 0 {
                let prev = points[k - 1];
                s += norm([x[0] - prev[0], x[1] - prev[1], x[2] - prev[2]]);
            }
            let v = sample_vector(&self.xi.xi, x, self.interp);
            let n = norm(v);
            if !(n > 0.0) {
                return Err(Error::LineLeavesN { index: k, value: self.omega_magnitude_at(x) });
            }
            samples.push(LineSample { position: x, s, xi: scale(v, 1.0 / n), ..Default::default() });
        }
        let mut line = VortexLine {
            step: s / (points.len() - 1) as f64,
            seed: points[0],
            terminated_reason: Termination::MaxLength,
            length: s,
            samples,
        };
        self.annotate(&mut line);
        Ok(line)
    }

    /// Fills the per-sample grid quantities by interpolation.
    pub fn annotate(&self, line: &mut VortexLine) {
        for p in &mut line.samples {
            let x = p.position;
            p.omega_mag = self.omega_magnitude_at(x);
            p.div_xi = sample_scalar(&self.deriv.div_xi, x, self.interp);
            let c = sample_vector(&self.curvature, x, self.interp);
            // the curvature vector is normal to xi by definition; drop the
            // tangential part left by interpolation
            let c = [0, 1, 2].map(|d| c[d] - dot(c, p.xi) * p.xi[d]);
            p.kappa = norm(c);
            p.normal = if p.kappa >= self.kappa_floor { scale(c, 1.0 / p.kappa) } else { [0.0; 3] };
            if let Some(u) = &self.u {
                let uv = sample_vector(u, x, self.interp);
                p.u_tan = dot(uv, p.xi);
                p.u_norm = dot(uv, p.normal);
            }
        }
    }

    pub fn diagnostics(&self, line: &mut VortexLine) -> Result<LineDiagnostics> {
        if line.len() < 2 {
            return Err(Error::LineTooShort(line.len()));
        }
        self.annotate(line);
        summarize(line)
    }
}

impl DirectionSource for LineFields {
    fn direction(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        if !stencil_valid(self.xi.grid(), &self.deriv.valid, x, self.interp) {
            return None;
        }
        let v = sample_vector(&self.xi.xi, x, self.interp);
        let n = norm(v);
        (n > 0.0).then(|| scale(v, 1.0 / n))
    }

    fn period(&self) -> Option<[f64; 3]> {
        Some(self.xi.grid().lengths())
    }

    fn max_step(&self) -> f64 {
        self.xi.grid().min_spacing() / 2.0
    }
}

/// `+1` when arc length runs along `xi`, `-1` when against it.
pub(crate) fn orientation(line: &VortexLine) -> f64 {
    match line.samples.as_slice() {
        [a, b, ..] => {
            let d = [0, 1, 2].map(|i| b.position[i] - a.position[i]);
            if dot(d, a.xi) < 0.0 {
                -1.0
            } else {
                1.0
            }
        }
        _ => 1.0,
    }
}

/// `div xi` along the arc-length direction of the line.
pub(crate) fn oriented_divergence(line: &VortexLine) -> Vec<f64> {
    let sign = orientation(line);
    line.samples.iter().map(|p| sign * p.div_xi).collect()
}

/// Reduces an annotated line to its summary quantities.
pub fn summarize(line: &VortexLine) -> Result<LineDiagnostics> {
    if line.len() < 2 {
        return Err(Error::LineTooShort(line.len()));
    }
    let s = line.arc_values();
    let div = oriented_divergence(line);
    let abs_div: Vec<f64> = div.iter().map(|v| v.abs()).collect();
    let div_integral = *cumulative_trapezoid(&s, &div).last().expect("two samples");
    let abs_div_integral = *cumulative_trapezoid(&s, &abs_div).last().expect("two samples");
    let fold_max = |f: &dyn Fn(&LineSample) -> f64| line.samples.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let max_div = fold_max(&|p| p.div_xi.abs());
    let max_kappa = fold_max(&|p| p.kappa);
    let u_max = fold_max(&|p| p.u_tan);
    let u_min = -fold_max(&|p| -p.u_tan);
    Ok(LineDiagnostics {
        arc_length: line.length,
        max_omega: fold_max(&|p| p.omega_mag),
        m_line: max_div.max(max_kappa),
        div_integral,
        abs_div_integral,
        u_xi_line: u_max - u_min,
        u_n_line: fold_max(&|p| p.u_norm.abs()),
        omega_start: line.samples[0].omega_mag,
        omega_end: line.samples[line.len() - 1].omega_mag,
    })
}

/// Annotates `line` against `omega` and `u` and summarizes it.
pub fn line_diagnostics(line: &mut VortexLine, omega: &VectorField3, u: &VectorField3) -> Result<LineDiagnostics> {
    if line.len() < 2 {
        return Err(Error::LineTooShort(line.len()));
    }
    LineFields::new(omega, Some(u))?.diagnostics(line)
}
