use std::f64::consts::PI;

use vld_core::direction::{
    direction_derivative_fields, direction_derivative_fields_with, unit_vorticity, FdOrder, MaskedDirectionField,
    DEFAULT_KAPPA_FLOOR,
};
use vld_core::generators::{abc_velocity, gen_field, FieldKind};
use vld_core::interp::{Interpolation, Sample};
use vld_core::spectral::{curl, divergence, gradient, solenoidal_project};
use vld_core::{Grid3, ScalarField3, VectorField3};

fn max_abs_diff(a: &VectorField3, b: &VectorField3) -> f64 {
    a.axpby(1.0, b, -1.0).max_abs()
}

#[test]
fn abc_is_beltrami() {
    let g = Grid3::cube(32).unwrap();
    let u = gen_field(FieldKind::abc_unit(), g).unwrap();
    assert!(max_abs_diff(&curl(&u), &u) <= 1e-12);
}

#[test]
fn curl_of_shear() {
    let g = Grid3::cube(16).unwrap();
    let u = VectorField3::from_fn(g, |x| [0.0, x[0].sin(), 0.0]);
    let w = VectorField3::from_fn(g, |x| [0.0, 0.0, x[0].cos()]);
    assert!(max_abs_diff(&curl(&u), &w) <= 1e-12);
}

#[test]
fn div_curl_and_curl_grad_vanish() {
    let g = Grid3::cube(32).unwrap();
    let u = gen_field(FieldKind::RandomSolenoidal { seed: 11, spectrum_slope: -5.0 / 3.0 }, g).unwrap();
    assert!(divergence(&curl(&u)).max_abs() <= 1e-12);
    // arbitrary non-solenoidal field too
    let v = VectorField3::from_fn(g, |x| [x[1].sin() * x[2].cos(), (2.0 * x[0]).cos(), x[0].sin() * x[1].sin()]);
    assert!(divergence(&curl(&v)).max_abs() <= 1e-12);
    let phi = ScalarField3::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() * x[2].cos());
    assert!(curl(&gradient(&phi)).max_abs() <= 1e-12);
}

#[test]
fn divergence_examples() {
    let g = Grid3::cube(32).unwrap();
    let tg = gen_field(FieldKind::TaylorGreen, g).unwrap();
    assert!(divergence(&tg).max_abs() <= 1e-12);
    let c = VectorField3::from_fn(g, |_| [1.5, -2.0, 0.25]);
    assert_eq!(divergence(&c).max_abs(), 0.0);
    let s = VectorField3::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]);
    let d = divergence(&s);
    let exact = ScalarField3::from_fn(g, |x| x[0].cos());
    let err = d.data().iter().zip(exact.data()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err <= 1e-12);
}

#[test]
fn projection_properties() {
    let g = Grid3::cube(32).unwrap();
    let tg = gen_field(FieldKind::TaylorGreen, g).unwrap();
    assert!(max_abs_diff(&solenoidal_project(&tg), &tg) <= 1e-12);

    let phi = ScalarField3::from_fn(g, |x| x[0].sin());
    let grad = gradient(&phi);
    assert!(solenoidal_project(&grad).max_abs() <= 1e-12);

    let v = gen_field(FieldKind::RandomSolenoidal { seed: 5, spectrum_slope: -2.0 }, g).unwrap();
    let mixed = v.axpby(1.0, &grad, 1.0);
    assert!(max_abs_diff(&solenoidal_project(&mixed), &solenoidal_project(&v)) <= 1e-12);

    let rough = VectorField3::from_fn(g, |x| [x[1].cos() * x[0].sin(), x[2].sin(), (x[0] * 2.0).cos()]);
    let p1 = solenoidal_project(&rough);
    assert!(divergence(&p1).max_abs() <= 1e-12);
    assert!(max_abs_diff(&solenoidal_project(&p1), &p1) <= 1e-12);
}

#[test]
fn unit_vorticity_normalized() {
    let g = Grid3::cube(32).unwrap();
    let w = curl(&gen_field(FieldKind::abc_unit(), g).unwrap());
    let xi = unit_vorticity(&w, 1e-8).unwrap();
    for idx in 0..g.len() {
        if xi.valid[idx] {
            let v = xi.xi.at(idx);
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn parallel_lines_have_zero_curvature() {
    let g = Grid3::cube(16).unwrap();
    // omega = (0, 0, f(x, y)) > 0: straight parallel lines
    let w = VectorField3::from_fn(g, |x| [0.0, 0.0, 2.0 + x[0].sin() * x[1].cos()]);
    let dd = direction_derivative_fields(&unit_vorticity(&w, 1e-8).unwrap());
    for idx in 0..g.len() {
        assert!(dd.valid[idx]);
        assert_eq!(dd.kappa.data()[idx], 0.0);
        assert_eq!(dd.normal.at(idx), [0.0; 3]);
    }
}

/// Max relative error of kappa against the exact 1/r over nodes with |r - 1| < h.
fn ring_node_error(n: usize, order: FdOrder) -> f64 {
    let g = Grid3::cube(n).unwrap();
    let dd = direction_derivative_fields_with(&azimuthal(g), order, DEFAULT_KAPPA_FLOOR);
    let h = g.spacing()[0];
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let p = g.position(i, j, 0);
            let r = ((p[0] - PI).powi(2) + (p[1] - PI).powi(2)).sqrt();
            if (r - 1.0).abs() < h {
                let idx = g.index(i, j, 0);
                assert!(dd.valid[idx]);
                worst = worst.max((dd.kappa.data()[idx] * r - 1.0).abs());
            }
        }
    }
    worst
}

#[test]
fn ring_curvature_stencil_convergence() {
    // measured: 4th order gives 2.2e-4 at 64^3; 6th order clears 1e-4
    let e64 = ring_node_error(64, FdOrder::Fourth);
    let e128 = ring_node_error(128, FdOrder::Fourth);
    assert!(e64 <= 3e-4, "{e64}");
    assert!(e64 / e128 >= 12.0, "4th-order convergence ratio {}", e64 / e128);
    assert!(ring_node_error(64, FdOrder::Sixth) <= 1e-4);
}

#[test]
fn ring_curvature_matches_circle() {
    // azimuthal unit field about the axis (pi, pi, *); exact curvature 1/r
    let g = Grid3::cube(64).unwrap();
    let xi = azimuthal(g);
    let dd = direction_derivative_fields_with(&xi, FdOrder::Sixth, DEFAULT_KAPPA_FLOOR);
    for a in 0..12 {
        let th = a as f64 * PI / 6.0 + 0.1;
        let p = [PI + th.cos(), PI + th.sin(), 1.3];
        let k = dd.kappa.sample_with(p, Interpolation::Tricubic);
        assert!((k - 1.0).abs() <= 1e-4, "kappa {k} at angle {th}");
        // normal points to the axis
        let n = dd.normal.sample_with(p, Interpolation::Tricubic);
        assert!((n[0] + th.cos()).abs() < 1e-3 && (n[1] + th.sin()).abs() < 1e-3);
        // azimuthal field is divergence free
        assert!(dd.div_xi.sample_with(p, Interpolation::Tricubic).abs() < 1e-4);
    }
}

fn azimuthal(g: Grid3) -> MaskedDirectionField {
    let mut f = MaskedDirectionField::from_fn(g, |x| {
        let (dx, dy) = (x[0] - PI, x[1] - PI);
        let r = (dx * dx + dy * dy).sqrt();
        if r < 1e-12 { [0.0; 3] } else { [-dy / r, dx / r, 0.0] }
    });
    for idx in 0..g.len() {
        let p = g.position(g.coords(idx).0, g.coords(idx).1, g.coords(idx).2);
        if ((p[0] - PI).powi(2) + (p[1] - PI).powi(2)).sqrt() < 1e-12 {
            f.valid[idx] = false;
        }
    }
    f
}

/// ABC direction field, differentiated by an 8th-order stencil applied to the
/// analytic function at a tiny step.
fn abc_oracle(p: [f64; 3]) -> (f64, f64) {
    let xi = |x: [f64; 3]| {
        let v = abc_velocity(1.0, 1.0, 1.0, x);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let h = 1e-2;
    let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let mut d = [[0.0; 3]; 3];
    for a in 0..3 {
        for (m, cm) in c.iter().enumerate() {
            let o = (m + 1) as f64 * h;
            let mut xp = p;
            let mut xm = p;
            xp[a] += o;
            xm[a] -= o;
            let (fp, fm) = (xi(xp), xi(xm));
            for b in 0..3 {
                d[a][b] += cm * (fp[b] - fm[b]) / h;
            }
        }
    }
    let x = xi(p);
    let div = d[0][0] + d[1][1] + d[2][2];
    let curv = [0, 1, 2].map(|b| x[0] * d[0][b] + x[1] * d[1][b] + x[2] * d[2][b]);
    (div, (curv[0] * curv[0] + curv[1] * curv[1] + curv[2] * curv[2]).sqrt())
}

#[test]
fn abc_direction_derivatives_match_refined_oracle() {
    let p = [0.1, 0.2, 0.3];
    let (div_ref, kappa_ref) = abc_oracle(p);
    // refined local box (h = 0.025) whose centre node sits on p
    let g = Grid3::new(32, 32, 32, 0.8, 0.8, 0.8).unwrap();
    let off = [p[0] - 0.4, p[1] - 0.4, p[2] - 0.4];
    let w = VectorField3::from_fn(g, |x| abc_velocity(1.0, 1.0, 1.0, [x[0] + off[0], x[1] + off[1], x[2] + off[2]]));
    let dd = direction_derivative_fields(&unit_vorticity(&w, 1e-8).unwrap());
    let idx = g.index(16, 16, 16);
    assert!(dd.valid[idx]);
    assert!((dd.div_xi.data()[idx] - div_ref).abs() <= 1e-6, "{} vs {}", dd.div_xi.data()[idx], div_ref);
    assert!((dd.kappa.data()[idx] - kappa_ref).abs() <= 1e-6, "{} vs {}", dd.kappa.data()[idx], kappa_ref);
}
