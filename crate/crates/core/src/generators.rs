//! Analytic and synthetic initial fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::VectorField3;
use crate::grid::Grid3;
use crate::spectral::Spectral;

/// Velocity field families understood by [`gen_field`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    Abc { a: f64, b: f64, c: f64 },
    TaylorGreen,
    AntiparallelTubes { separation: f64, core_radius: f64, circulation: f64 },
    ShearLayer,
    RandomSolenoidal { seed: u64, spectrum_slope: f64 },
}

impl FieldKind {
    pub fn abc_unit() -> Self {
        FieldKind::Abc { a: 1.0, b: 1.0, c: 1.0 }
    }

    pub fn default_tubes() -> Self {
        FieldKind::AntiparallelTubes { separation: PI, core_radius: 0.3, circulation: 1.0 }
    }
}

/// ABC velocity `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
pub fn abc_velocity(a: f64, b: f64, c: f64, x: [f64; 3]) -> [f64; 3] {
    [
        a * x[2].sin() + c * x[1].cos(),
        b * x[0].sin() + a * x[2].cos(),
        c * x[1].sin() + b * x[0].cos(),
    ]
}

pub fn taylor_green_velocity(x: [f64; 3]) -> [f64; 3] {
    [
        x[0].sin() * x[1].cos() * x[2].cos(),
        -x[0].cos() * x[1].sin() * x[2].cos(),
        0.0,
    ]
}

/// Builds a divergence-free velocity field of the requested family.
pub fn gen_field(kind: FieldKind, grid: Grid3) -> Result<VectorField3> {
    match kind {
        FieldKind::Abc { a, b, c } => {
            if ![a, b, c].iter().all(|v| v.is_finite()) {
                return Err(Error::Config("ABC coefficients must be finite".into()));
            }
            Ok(VectorField3::from_fn(grid, |x| abc_velocity(a, b, c, x)))
        }
        FieldKind::TaylorGreen => Ok(VectorField3::from_fn(grid, taylor_green_velocity)),
        FieldKind::AntiparallelTubes { separation, core_radius, circulation } => {
            antiparallel_tubes(grid, separation, core_radius, circulation)
        }
        FieldKind::ShearLayer => Ok(shear_layer(grid)),
        FieldKind::RandomSolenoidal { seed, spectrum_slope } => {
            random_solenoidal(grid, seed, spectrum_slope)
        }
    }
}

/// Gaussian-core vortex ring in the plane `z = center[2]`, axis along +z.
///
/// Peak vorticity is `circulation / (pi core^2)` along the azimuthal direction.
pub fn vortex_ring_vorticity(
    grid: Grid3,
    center: [f64; 3],
    radius: f64,
    core: f64,
    circulation: f64,
) -> VectorField3 {
    let peak = circulation / (PI * core * core);
    VectorField3::from_fn(grid, |x| {
        let (dx, dy, dz) = (x[0] - center[0], x[1] - center[1], x[2] - center[2]);
        let rho = (dx * dx + dy * dy).sqrt();
        if rho == 0.0 {
            return [0.0; 3];
        }
        let d2 = (rho - radius).powi(2) + dz * dz;
        let w = peak * (-d2 / (core * core)).exp();
        [-w * dy / rho, w * dx / rho, 0.0]
    })
}

/// Straight Gaussian tube along x through `(y0, z0)` with the given peak.
pub fn gaussian_tube_vorticity(grid: Grid3, y0: f64, z0: f64, core: f64, peak: f64) -> VectorField3 {
    VectorField3::from_fn(grid, |x| {
        let dy = x[1] - y0;
        let dz = x[2] - z0;
        [peak * (-(dy * dy + dz * dz) / (core * core)).exp(), 0.0, 0.0]
    })
}

// Two tubes along x, separated in y, centerlines bent toward each other by
// `core_radius * cos(2 pi x / lx)` so the pair is three-dimensional.
fn antiparallel_tubes(grid: Grid3, separation: f64, core_radius: f64, circulation: f64) -> Result<VectorField3> {
    if !(separation.is_finite() && core_radius.is_finite() && circulation.is_finite()) {
        return Err(Error::Config("tube parameters must be finite".into()));
    }
    if !(core_radius > 0.0 && core_radius < separation / 2.0) {
        return Err(Error::Config(format!(
            "core_radius {core_radius} must lie in (0, separation/2 = {})",
            separation / 2.0
        )));
    }
    if circulation == 0.0 {
        return Err(Error::Config("circulation must be nonzero".into()));
    }
    if separation + 6.0 * core_radius >= grid.ly {
        return Err(Error::Config("tubes do not fit in the box along y".into()));
    }
    let peak = circulation / (PI * core_radius * core_radius);
    let c = grid.center();
    let kx = 2.0 * PI / grid.lx;
    let amp = core_radius;
    let omega = VectorField3::from_fn(grid, |x| {
        let bend = amp * (kx * x[0]).cos();
        let slope = -amp * kx * (kx * x[0]).sin();
        let mut w = [0.0; 3];
        for (sign, side) in [(1.0, -1.0), (-1.0, 1.0)] {
            let yc = c[1] + side * (separation / 2.0 - bend);
            let dy = x[1] - yc;
            let dz = x[2] - c[2];
            let mag = sign * peak * (-(dy * dy + dz * dz) / (core_radius * core_radius)).exp();
            let ty = -side * slope;
            let tn = (1.0 + ty * ty).sqrt();
            w[0] += mag / tn;
            w[1] += mag * ty / tn;
        }
        w
    });
    let sp = Spectral::new(grid);
    let mut w_hat = sp.forward_vector(&omega);
    sp.project_hat(&mut w_hat);
    for comp in w_hat.iter_mut() {
        comp[0] = Complex64::new(0.0, 0.0);
    }
    Ok(sp.inverse_vector(&sp.biot_savart_hat(&w_hat)))
}

fn shear_layer(grid: Grid3) -> VectorField3 {
    let delta = grid.lz / (10.0 * PI);
    let lz = grid.lz;
    let kx = 2.0 * PI / grid.lx;
    VectorField3::from_fn(grid, |x| {
        let z = x[2];
        let ux = if z <= lz / 2.0 {
            ((z - lz / 4.0) / delta).tanh()
        } else {
            ((3.0 * lz / 4.0 - z) / delta).tanh()
        };
        [ux, 0.0, 0.05 * (kx * x[0]).sin()]
    })
}

// Filtered white noise: energy spectrum ~ k^slope below the 2/3 cutoff,
// projected, mean removed, scaled to unit rms speed.
fn random_solenoidal(grid: Grid3, seed: u64, slope: f64) -> Result<VectorField3> {
    if !slope.is_finite() {
        return Err(Error::Config("spectrum_slope must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = VectorField3::from_components_unchecked(
        grid,
        [0, 1, 2].map(|_| (0..grid.len()).map(|_| StandardNormal.sample(&mut rng)).collect()),
    );
    let sp = Spectral::new(grid);
    let mask = sp.dealias_mask();
    let mut s = sp.forward_vector(&noise);
    for idx in 0..sp.spectral_len() {
        let k = sp.wavevector(idx);
        let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let amp = if kk == 0.0 || !mask[idx] { 0.0 } else { kk.powf((slope - 2.0) / 2.0) };
        for comp in s.iter_mut() {
            comp[idx] *= amp;
        }
    }
    sp.project_hat(&mut s);
    let v = sp.inverse_vector(&s);
    let rms = (2.0 * v.energy() / (grid.lx * grid.ly * grid.lz)).sqrt();
    if rms == 0.0 {
        return Err(Error::Config("random field has no energy on this grid".into()));
    }
    Ok(v.scale(1.0 / rms))
}
