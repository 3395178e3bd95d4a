//! Fourier transforms and spectral differential operators on the periodic box.
//!
//! Real-to-complex along x (half spectrum, `nx/2 + 1` modes), complex along y
//! and z. Odd-derivative wavenumbers are zeroed at the Nyquist index so that
//! derivatives of real fields stay real; the same wavevector is used by every
//! operator, which makes `div(project(v))` vanish to rounding.

use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::field::{ScalarField3, VectorField3};
use crate::grid::Grid3;

pub type Spectrum = Vec<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub struct Spectral {
    grid: Grid3,
    nxh: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
    fft_z: Arc<dyn Fft<f64>>,
    ifft_z: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
    kz: Vec<f64>,
    mx: Vec<i64>,
    my: Vec<i64>,
    mz: Vec<i64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

fn mode_numbers(n: usize, half: bool) -> Vec<i64> {
    let len = if half { n / 2 + 1 } else { n };
    (0..len)
        .map(|j| if half || j <= n / 2 { j as i64 } else { j as i64 - n as i64 })
        .collect()
}

fn derivative_wavenumbers(modes: &[i64], n: usize, l: f64) -> Vec<f64> {
    modes
        .iter()
        .map(|&m| {
            if m.unsigned_abs() as usize == n / 2 {
                0.0
            } else {
                std::f64::consts::TAU / l * m as f64
            }
        })
        .collect()
}

impl Spectral {
    pub fn new(grid: Grid3) -> Self {
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        let mx = mode_numbers(grid.nx, true);
        let my = mode_numbers(grid.ny, false);
        let mz = mode_numbers(grid.nz, false);
        Self {
            grid,
            nxh: grid.nx / 2 + 1,
            r2c: rp.plan_fft_forward(grid.nx),
            c2r: rp.plan_fft_inverse(grid.nx),
            fft_y: cp.plan_fft_forward(grid.ny),
            ifft_y: cp.plan_fft_inverse(grid.ny),
            fft_z: cp.plan_fft_forward(grid.nz),
            ifft_z: cp.plan_fft_inverse(grid.nz),
            kx: derivative_wavenumbers(&mx, grid.nx, grid.lx),
            ky: derivative_wavenumbers(&my, grid.ny, grid.ly),
            kz: derivative_wavenumbers(&mz, grid.nz, grid.lz),
            mx,
            my,
            mz,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    /// Number of stored spectral coefficients.
    pub fn spectral_len(&self) -> usize {
        self.nxh * self.grid.ny * self.grid.nz
    }

    #[inline]
    pub fn spectral_coords(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.nxh;
        let j = (idx / self.nxh) % self.grid.ny;
        let k = idx / (self.nxh * self.grid.ny);
        (i, j, k)
    }

    /// Derivative wavevector of a stored mode (Nyquist components zeroed).
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.spectral_coords(idx);
        [self.kx[i], self.ky[j], self.kz[k]]
    }

    /// Integer mode numbers of a stored mode.
    #[inline]
    pub fn modes(&self, idx: usize) -> [i64; 3] {
        let (i, j, k) = self.spectral_coords(idx);
        [self.mx[i], self.my[j], self.mz[k]]
    }

    /// Weight of a stored half-spectrum mode in a full-spectrum sum
    /// (interior x modes stand for themselves and their conjugate).
    #[inline]
    pub fn hermitian_weight(&self, idx: usize) -> f64 {
        let i = idx % self.nxh;
        if i == 0 || i == self.grid.nx / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// 2/3-rule truncation mask.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let g = self.grid;
        (0..self.spectral_len())
            .map(|idx| {
                let m = self.modes(idx);
                3 * m[0].unsigned_abs() < g.nx as u64
                    && 3 * m[1].unsigned_abs() < g.ny as u64
                    && 3 * m[2].unsigned_abs() < g.nz as u64
            })
            .collect()
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, real: &[f64]) -> Spectrum {
        let g = self.grid;
        assert_eq!(real.len(), g.len(), "forward: wrong input length");
        let nxh = self.nxh;
        let mut out = vec![Complex64::new(0.0, 0.0); self.spectral_len()];
        let mut line = vec![0.0; g.nx];
        let mut scratch = self.r2c.make_scratch_vec();
        for jk in 0..g.ny * g.nz {
            line.copy_from_slice(&real[jk * g.nx..(jk + 1) * g.nx]);
            self.r2c
                .process_with_scratch(&mut line, &mut out[jk * nxh..(jk + 1) * nxh], &mut scratch)
                .expect("r2c length mismatch");
        }
        self.transform_y(&mut out, &self.fft_y);
        self.transform_z(&mut out, &self.fft_z);
        out
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let g = self.grid;
        assert_eq!(spec.len(), self.spectral_len(), "inverse: wrong input length");
        let nxh = self.nxh;
        let mut work = spec.to_vec();
        self.transform_z(&mut work, &self.ifft_z);
        self.transform_y(&mut work, &self.ifft_y);
        let norm = 1.0 / g.len() as f64;
        let mut out = vec![0.0; g.len()];
        let mut scratch = self.c2r.make_scratch_vec();
        for jk in 0..g.ny * g.nz {
            let line = &mut work[jk * nxh..(jk + 1) * nxh];
            line[0].im = 0.0;
            line[nxh - 1].im = 0.0;
            self.c2r
                .process_with_scratch(line, &mut out[jk * g.nx..(jk + 1) * g.nx], &mut scratch)
                .expect("c2r length mismatch");
        }
        out.iter_mut().for_each(|v| *v *= norm);
        out
    }

    fn transform_y(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let (nxh, ny, nz) = (self.nxh, self.grid.ny, self.grid.nz);
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        // gather: lines indexed by (i, k), y contiguous
        for k in 0..nz {
            for j in 0..ny {
                let src = nxh * (j + ny * k);
                for i in 0..nxh {
                    buf[(i + nxh * k) * ny + j] = data[src + i];
                }
            }
        }
        plan.process(&mut buf);
        for k in 0..nz {
            for j in 0..ny {
                let dst = nxh * (j + ny * k);
                for i in 0..nxh {
                    data[dst + i] = buf[(i + nxh * k) * ny + j];
                }
            }
        }
    }

    fn transform_z(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let (plane, nz) = (self.nxh * self.grid.ny, self.grid.nz);
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        for k in 0..nz {
            for p in 0..plane {
                buf[p * nz + k] = data[p + plane * k];
            }
        }
        plan.process(&mut buf);
        for k in 0..nz {
            for p in 0..plane {
                data[p + plane * k] = buf[p * nz + k];
            }
        }
    }

    pub fn forward_vector(&self, v: &VectorField3) -> [Spectrum; 3] {
        [0, 1, 2].map(|d| self.forward(v.component(d).data()))
    }

    pub fn inverse_vector(&self, s: &[Spectrum; 3]) -> VectorField3 {
        VectorField3::from_components_unchecked(self.grid, [0, 1, 2].map(|d| self.inverse(&s[d])))
    }

    /// `i k x v_hat`.
    pub fn curl_hat(&self, v: &[Spectrum; 3]) -> [Spectrum; 3] {
        let n = self.spectral_len();
        let mut out = [0, 1, 2].map(|_| vec![Complex64::new(0.0, 0.0); n]);
        for idx in 0..n {
            let k = self.wavevector(idx);
            let (a, b, c) = (v[0][idx], v[1][idx], v[2][idx]);
            out[0][idx] = I * (k[1] * c - k[2] * b);
            out[1][idx] = I * (k[2] * a - k[0] * c);
            out[2][idx] = I * (k[0] * b - k[1] * a);
        }
        out
    }

    pub fn divergence_hat(&self, v: &[Spectrum; 3]) -> Spectrum {
        (0..self.spectral_len())
            .map(|idx| {
                let k = self.wavevector(idx);
                I * (k[0] * v[0][idx] + k[1] * v[1][idx] + k[2] * v[2][idx])
            })
            .collect()
    }

    /// Leray projection `(I - k k^T / |k|^2) v_hat`, in place.
    pub fn project_hat(&self, v: &mut [Spectrum; 3]) {
        for idx in 0..self.spectral_len() {
            let k = self.wavevector(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                continue;
            }
            let kv = (k[0] * v[0][idx] + k[1] * v[1][idx] + k[2] * v[2][idx]) / k2;
            for d in 0..3 {
                v[d][idx] -= kv * k[d];
            }
        }
    }

    /// `curl (-Laplacian)^{-1} w_hat`; the mean mode maps to zero.
    pub fn biot_savart_hat(&self, w: &[Spectrum; 3]) -> [Spectrum; 3] {
        let mut out = self.curl_hat(w);
        for idx in 0..self.spectral_len() {
            let k = self.wavevector(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            for comp in out.iter_mut() {
                comp[idx] = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { comp[idx] / k2 };
            }
        }
        out
    }

    /// `0.5 * integral |u|^2` from a velocity spectrum (Parseval).
    pub fn energy_hat(&self, v: &[Spectrum; 3]) -> f64 {
        let n = self.grid.len() as f64;
        let vol = self.grid.lx * self.grid.ly * self.grid.lz;
        let mut s = 0.0;
        for idx in 0..self.spectral_len() {
            let w = self.hermitian_weight(idx);
            s += w * (v[0][idx].norm_sqr() + v[1][idx].norm_sqr() + v[2][idx].norm_sqr());
        }
        0.5 * s * vol / (n * n)
    }

    pub fn curl(&self, v: &VectorField3) -> VectorField3 {
        self.inverse_vector(&self.curl_hat(&self.forward_vector(v)))
    }

    pub fn divergence(&self, v: &VectorField3) -> ScalarField3 {
        let d = self.divergence_hat(&self.forward_vector(v));
        ScalarField3::from_vec_unchecked(self.grid, self.inverse(&d))
    }

    pub fn gradient(&self, f: &ScalarField3) -> VectorField3 {
        let s = self.forward(f.data());
        let parts = [0, 1, 2].map(|d| {
            let g: Spectrum = s
                .iter()
                .enumerate()
                .map(|(idx, &c)| I * self.wavevector(idx)[d] * c)
                .collect();
            self.inverse(&g)
        });
        VectorField3::from_components_unchecked(self.grid, parts)
    }

    pub fn project(&self, v: &VectorField3) -> VectorField3 {
        let mut s = self.forward_vector(v);
        self.project_hat(&mut s);
        self.inverse_vector(&s)
    }
}

/// Spectral curl `omega = curl v`.
pub fn curl(v: &VectorField3) -> VectorField3 {
    Spectral::new(*v.grid()).curl(v)
}

/// Spectral divergence.
pub fn divergence(v: &VectorField3) -> ScalarField3 {
    Spectral::new(*v.grid()).divergence(v)
}

/// Spectral gradient of a scalar field.
pub fn gradient(f: &ScalarField3) -> VectorField3 {
    Spectral::new(*f.grid()).gradient(f)
}

/// Leray projection onto divergence-free fields.
pub fn solenoidal_project(v: &VectorField3) -> VectorField3 {
    Spectral::new(*v.grid()).project(v)
}
