use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::VectorField3;
use crate::interp::{sample_vector, Interpolation};

/// Velocity as a function of position and time.
pub trait VelocityProvider: Sync {
    fn velocity(&self, x: [f64; 3], t: f64) -> [f64; 3];
}

pub struct AnalyticVelocity<F> {
    f: F,
}

impl<F: Fn([f64; 3], f64) -> [f64; 3] + Sync> AnalyticVelocity<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F: Fn([f64; 3], f64) -> [f64; 3] + Sync> VelocityProvider for AnalyticVelocity<F> {
    fn velocity(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        (self.f)(x, t)
    }
}

/// Stored grid velocities, linear in time between snapshots and held constant
/// outside the stored range. One snapshot gives a steady field.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    times: Vec<f64>,
    fields: Vec<VectorField3>,
    pub interp: Interpolation,
}

impl SnapshotSeries {
    pub fn new(times: Vec<f64>, fields: Vec<VectorField3>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::Shape(format!("{} times for {} snapshots", times.len(), fields.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("snapshot times must be strictly increasing".into()));
        }
        if fields.iter().any(|f| f.grid() != fields[0].grid()) {
            return Err(Error::Shape("snapshots on different grids".into()));
        }
        Ok(Self { times, fields, interp: Interpolation::Trilinear })
    }

    pub fn steady(u: VectorField3) -> Self {
        Self { times: vec![0.0], fields: vec![u], interp: Interpolation::Trilinear }
    }

    pub fn with_interpolation(mut self, m: Interpolation) -> Self {
        self.interp = m;
        self
    }
}

impl VelocityProvider for SnapshotSeries {
    fn velocity(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return sample_vector(&self.fields[0], x, self.interp);
        }
        if t >= self.times[n - 1] {
            return sample_vector(&self.fields[n - 1], x, self.interp);
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let a = sample_vector(&self.fields[k], x, self.interp);
        if w == 0.0 {
            return a;
        }
        let b = sample_vector(&self.fields[k + 1], x, self.interp);
        [0, 1, 2].map(|d| (1.0 - w) * a[d] + w * b[d])
    }
}

/// RK4 on `dX/dt = u(X, t)` from `t1` to `t2`. The step is shrunk so the
/// interval holds a whole number of steps. Each trajectory lists the
/// (unwrapped) positions at every step, starting with the initial point.
pub fn advect_particles<P: VelocityProvider + ?Sized>(
    provider: &P,
    points: &[[f64; 3]],
    t1: f64,
    t2: f64,
    dt: f64,
) -> Result<Vec<Vec<[f64; 3]>>> {
    if !(t2 > t1) {
        return Err(Error::Domain(format!("t2 = {t2} must exceed t1 = {t1}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt = {dt} must be positive")));
    }
    let n = ((t2 - t1) / dt - 1e-9).ceil().max(1.0) as usize;
    let h = (t2 - t1) / n as f64;
    Ok(points
        .par_iter()
        .map(|&x0| {
            let mut traj = Vec::with_capacity(n + 1);
            traj.push(x0);
            let mut x = x0;
            for k in 0..n {
                let t = t1 + k as f64 * h;
                x = rk4(provider, x, t, h);
                traj.push(x);
            }
            traj
        })
        .collect())
}

/// Final positions only.
pub fn advect_points<P: VelocityProvider + ?Sized>(
    provider: &P,
    points: &[[f64; 3]],
    t1: f64,
    t2: f64,
    dt: f64,
) -> Result<Vec<[f64; 3]>> {
    Ok(advect_particles(provider, points, t1, t2, dt)?
        .into_iter()
        .map(|tr| *tr.last().expect("non-empty trajectory"))
        .collect())
}

fn rk4<P: VelocityProvider + ?Sized>(p: &P, x: [f64; 3], t: f64, h: f64) -> [f64; 3] {
    let at = |x: [f64; 3], d: [f64; 3], f: f64| [x[0] + f * d[0], x[1] + f * d[1], x[2] + f * d[2]];
    let k1 = p.velocity(x, t);
    let k2 = p.velocity(at(x, k1, h / 2.0), t + h / 2.0);
    let k3 = p.velocity(at(x, k2, h / 2.0), t + h / 2.0);
    let k4 = p.velocity(at(x, k3, h), t + h);
    [0, 1, 2].map(|d| x[d] + h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid3;

    #[test]
    fn series_interpolates_linearly_in_time() {
        let g = Grid3::cube(8).unwrap();
        let a = VectorField3::from_fn(g, |_| [1.0, 0.0, 0.0]);
        let b = VectorField3::from_fn(g, |_| [3.0, 0.0, 2.0]);
        let s = SnapshotSeries::new(vec![0.0, 1.0], vec![a, b]).unwrap();
        let v = s.velocity([0.3, 0.2, 0.1], 0.25);
        assert!((v[0] - 1.5).abs() < 1e-14 && (v[2] - 0.5).abs() < 1e-14);
        assert_eq!(s.velocity([0.0; 3], 5.0), [3.0, 0.0, 2.0]);
    }

    #[test]
    fn rejects_bad_interval() {
        let p = AnalyticVelocity::new(|_, _| [0.0; 3]);
        assert!(advect_particles(&p, &[[0.0; 3]], 1.0, 1.0, 0.1).is_err());
    }
}
