use std::f64::consts::PI;

use proptest::prelude::*;
use vld_core::biot_savart::*;
use vld_core::generators::{gen_field, taylor_green_velocity, vortex_ring_vorticity, FieldKind};
use vld_core::spectral::curl;
use vld_core::{Grid3, VectorField3};

/// Off-centre Gaussian blob with a swirl, compactly supported in the middle half.
fn blob(g: Grid3, c: [f64; 3], amp: [f64; 3]) -> VectorField3 {
    VectorField3::from_fn(g, |x| {
        let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
        let e = (-(d[0] * d[0] + 2.0 * d[1] * d[1] + d[2] * d[2]) / 0.04).exp();
        [amp[0] * e, amp[1] * e * (1.0 + d[0]), amp[2] * e]
    })
}

#[test]
fn ring_center_axial_velocity() {
    // thin ring, Gamma = 1, R = 1: u_z(center) = Gamma / 2R
    let g = Grid3::cube(128).unwrap();
    let c = [PI, PI, PI];
    let w = vortex_ring_vorticity(g, c, 1.0, 0.05, 1.0);
    let u = bs_velocity(&w, c).unwrap();
    assert!((u[2] - 0.5).abs() <= 0.05 * 0.5, "u_z = {}", u[2]);
    assert!(u[0].abs() < 1e-10 && u[1].abs() < 1e-10);
}

#[test]
fn mirror_through_x() {
    let g = Grid3::cube(32).unwrap();
    let w = blob(g, [PI + 0.2, PI - 0.1, PI + 0.3], [0.3, 1.0, -0.5]);
    // omega'(x) = R omega(R x) with R the reflection x -> 2pi - x
    let refl = |p: [f64; 3]| [2.0 * PI - p[0], p[1], p[2]];
    let n = g.nx;
    let mut m = VectorField3::zeros(g);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let src = w.at(g.index((n - i) % n, j, k));
                let dst = g.index(i, j, k);
                m.component_mut(0).data_mut()[dst] = -src[0];
                m.component_mut(1).data_mut()[dst] = src[1];
                m.component_mut(2).data_mut()[dst] = src[2];
            }
        }
    }
    let p = [PI + 0.71, PI - 0.23, PI + 0.47];
    let u = bs_velocity(&w, p).unwrap();
    let v = bs_velocity(&m, refl(p)).unwrap();
    // kernel odd: u'(Rx) = -R u(x)
    let expect = [u[0], -u[1], -u[2]];
    for a in 0..3 {
        assert!((v[a] - expect[a]).abs() <= 1e-12 * (1.0 + u[a].abs()), "{v:?} vs {expect:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn direct_sum_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, p in prop::array::uniform3(2.0f64..4.0)) {
        let g = Grid3::cube(16).unwrap();
        let w1 = blob(g, [PI, PI, PI], [1.0, 0.0, 0.5]);
        let w2 = blob(g, [PI + 0.3, PI, PI - 0.2], [0.0, -1.0, 2.0]);
        let wc = w1.axpby(a, &w2, b);
        let u1 = bs_velocity(&w1, p).unwrap();
        let u2 = bs_velocity(&w2, p).unwrap();
        let uc = bs_velocity(&wc, p).unwrap();
        for d in 0..3 {
            let lhs = a * u1[d] + b * u2[d];
            prop_assert!((uc[d] - lhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn bound_scales_as_three_fifths(om in 1e-3f64..1e6) {
        let s = cutoff_bound(om, 1.0, optimal_rho(om).unwrap()).unwrap();
        let c = 2.0 + far_bs_constant() + far_grad_constant();
        prop_assert!((s.total_bound / om.powf(0.6) / c - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn spectral_inverse_of_cosine() {
    let g = Grid3::cube(32).unwrap();
    let w = VectorField3::from_fn(g, |x| [0.0, 0.0, x[0].cos()]);
    let u = bs_spectral_invert(&w).unwrap();
    let exact = VectorField3::from_fn(g, |x| [0.0, x[0].sin(), 0.0]);
    assert!(u.max_diff(&exact) <= 1e-12);
}

#[test]
fn spectral_inverse_recovers_taylor_green() {
    let g = Grid3::cube(32).unwrap();
    let u0 = VectorField3::from_fn(g, taylor_green_velocity);
    let u = bs_spectral_invert(&curl(&u0)).unwrap();
    assert!(u.max_diff(&u0) <= 1e-10);
}

#[test]
fn spectral_inverse_is_right_inverse_of_curl() {
    let g = Grid3::cube(32).unwrap();
    let u0 = gen_field(FieldKind::RandomSolenoidal { seed: 7, spectrum_slope: -3.0 }, g).unwrap();
    let w = curl(&u0);
    let u = bs_spectral_invert(&w).unwrap();
    assert!(curl(&u).max_diff(&w) <= 1e-10 * w.max_magnitude().max(1.0));
    assert!(vld_core::spectral::divergence(&u).max_abs() <= 1e-12);
    // inversion after curl is the identity on the mean-free solenoidal field
    assert!(u.max_diff(&u0) <= 1e-10);
}

#[test]
fn padded_ring_spectral_matches_direct() {
    let g = Grid3::cube(64).unwrap();
    let c = [PI, PI, PI];
    // core spans two cells; at sigma = 0.1 the sampled ring carries energy at
    // the Nyquist scale and the spectral inverse is off by 7% at 64^3
    let w = vortex_ring_vorticity(g, c, 0.5, 0.2, 1.0);
    let periodic = bs_spectral_invert(&w).unwrap();
    let umax = periodic.max_magnitude();
    // points clear of the core, where the midpoint rule resolves the kernel
    let pts = [c, [PI + 0.1, PI - 0.1, PI + 0.3], [PI, PI, PI + 0.7], [PI + 1.3, PI, PI - 0.2], [PI, PI + 0.8, PI - 0.6]];
    let direct = bs_velocity_many(&w, &pts).unwrap();
    for (p, d) in pts.iter().zip(&direct) {
        let s = vld_core::interp::sample_vector(&periodic, *p, vld_core::interp::Interpolation::Quintic);
        let err = ((s[0] - d[0]).powi(2) + (s[1] - d[1]).powi(2) + (s[2] - d[2]).powi(2)).sqrt();
        assert!(err <= 0.01 * umax, "at {p:?}: spectral {s:?} direct {d:?}");
    }
}

#[test]
fn minimizer_matches_golden_section() {
    let f = |r: f64| cutoff_bound(1.0, 1.0, r).unwrap().total_bound;
    let (mut a, mut b) = (0.05, 20.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let golden = 0.5 * (a + b);
    let closed = bound_minimizing_rho(1.0, 1.0).unwrap();
    // the function-value search cannot resolve a flat minimum past ~sqrt(eps)
    assert!((golden - closed).abs() <= 1e-7, "{golden} vs {closed}");
    // stationarity of the closed form at the tighter tolerance
    let bconst = far_bs_constant() + far_grad_constant();
    let slope = 2.0 - 1.5 * bconst * closed.powf(-2.5);
    assert!(slope.abs() <= 1e-10);
    // strictly convex around it
    assert!(f(closed * 0.9) > f(closed) && f(closed * 1.1) > f(closed));
}

#[test]
fn taylor_green_passes_and_scales() {
    let g = Grid3::cube(32).unwrap();
    let u = VectorField3::from_fn(g, taylor_green_velocity);
    let w = curl(&u);
    let r = check_35_bound(&u, &w).unwrap();
    assert!(r.pass);
    assert!((r.rho_used - r.omega.powf(-0.4)).abs() < 1e-15);
    let r2 = check_35_bound(&u.scale(0.01), &w.scale(0.01)).unwrap();
    assert!(r2.pass);
    let expected = r.ratio * 0.01 / 0.01f64.powf(0.6);
    assert!((r2.ratio - expected).abs() <= 1e-12 * expected);
}
