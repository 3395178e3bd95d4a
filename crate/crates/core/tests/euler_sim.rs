use std::f64::consts::PI;

use proptest::prelude::*;
use vld_core::euler_sim::*;
use vld_core::generators::{abc_velocity, gen_field, taylor_green_velocity, FieldKind};
use vld_core::interp::Interpolation;
use vld_core::spectral::curl;
use vld_core::vortex_line::{Direction, LineFields};
use vld_core::{Grid3, VectorField3};

fn abc(x: [f64; 3]) -> [f64; 3] {
    abc_velocity(1.0, 1.0, 1.0, x)
}

fn rel_max_diff(a: &VectorField3, b: &VectorField3) -> f64 {
    a.max_diff(b) / b.max_abs()
}

#[test]
fn abc_is_steady() {
    let g = Grid3::cube(32).unwrap();
    let u0 = VectorField3::from_fn(g, abc);
    let solver = EulerSolver::new(g);
    let mut s = solver.init(&u0, 0.0).unwrap();
    for _ in 0..500 {
        s = solver.step(&s, 1e-3).unwrap();
    }
    let drift = rel_max_diff(&solver.velocity(&s), &u0);
    assert!(drift <= 1e-6, "drift {drift}");
}

#[test]
fn taylor_green_conserves_energy_and_stays_solenoidal() {
    let g = Grid3::cube(32).unwrap();
    let solver = EulerSolver::new(g);
    let mut s = solver.init(&VectorField3::from_fn(g, taylor_green_velocity), 0.0).unwrap();
    let e0 = solver.energy(&s);
    let mut worst_step = 0.0f64;
    let mut worst_div = 0.0f64;
    for _ in 0..500 {
        let e = solver.energy(&s);
        s = solver.step(&s, 2e-3).unwrap();
        worst_step = worst_step.max((solver.energy(&s) - e).abs() / e0);
        worst_div = worst_div.max(solver.spectral_divergence(&s));
    }
    let drift = (solver.energy(&s) - e0).abs() / e0;
    assert!((s.t - 1.0).abs() < 1e-12);
    assert!(drift <= 1e-8, "energy drift {drift}");
    assert!(worst_step <= 1e-10, "per-step drift {worst_step}");
    assert!(worst_div <= 1e-12, "divergence {worst_div}");
}

#[test]
fn helicity_drift_is_small() {
    let g = Grid3::cube(32).unwrap();
    let u = gen_field(FieldKind::RandomSolenoidal { seed: 3, spectrum_slope: -5.0 }, g).unwrap();
    let solver = EulerSolver::new(g);
    let mut s = solver.init(&u, 0.0).unwrap();
    let h0 = solver.helicity(&s);
    let dt = 0.5 * solver.cfl_limit(&s);
    for _ in 0..50 {
        s = solver.step(&s, dt).unwrap();
    }
    let scale = solver.energy(&s).sqrt() * solver.vorticity(&s).l2_norm();
    let drift = (solver.helicity(&s) - h0).abs() / scale;
    assert!(drift <= 1e-6, "helicity drift {drift}");
}

#[test]
fn uniform_flow_displacement() {
    let p = AnalyticVelocity::new(|_, _| [1.0, 0.0, 0.0]);
    let end = advect_points(&p, &[[0.3, 0.4, 0.5]], 0.0, 1.0, 0.1).unwrap()[0];
    assert!((end[0] - 1.3).abs() <= 1e-12 && (end[1] - 0.4).abs() <= 1e-12 && (end[2] - 0.5).abs() <= 1e-12);

    let g = Grid3::cube(16).unwrap();
    let steady = SnapshotSeries::steady(VectorField3::from_fn(g, |_| [1.0, 0.0, 0.0]));
    let end = advect_points(&steady, &[[0.3, 0.4, 0.5]], 2.0, 3.0, 0.1).unwrap()[0];
    assert!((end[0] - 1.3).abs() <= 1e-12);
}

#[test]
fn solid_body_rotation_keeps_radius() {
    let p = AnalyticVelocity::new(|x: [f64; 3], _| [-x[1], x[0], 0.0]);
    let traj = &advect_particles(&p, &[[1.5, 0.0, 0.2]], 0.0, 2.0 * PI, 0.01).unwrap()[0];
    for x in traj {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        assert!((r - 1.5).abs() <= 1e-8, "radius {r}");
    }
}

/// Period of the (x, z) orbit of ABC with A = B = 1, C = 0 from `x0`, by a
/// fine RK4 run and linear interpolation of the second downward z crossing.
fn orbit_period(x0: [f64; 3]) -> f64 {
    let f = |x: [f64; 3]| abc_velocity(1.0, 1.0, 0.0, x);
    let h = 1e-5;
    let mut x = x0;
    let mut t = 0.0;
    let mut ups = 0;
    loop {
        let k1 = f(x);
        let k2 = f([0, 1, 2].map(|a| x[a] + h / 2.0 * k1[a]));
        let k3 = f([0, 1, 2].map(|a| x[a] + h / 2.0 * k2[a]));
        let k4 = f([0, 1, 2].map(|a| x[a] + h * k3[a]));
        let y = [0, 1, 2].map(|a| x[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]));
        if x[2] < 0.0 && y[2] >= 0.0 {
            ups += 1;
        }
        if ups == 1 && x[2] > 0.0 && y[2] <= 0.0 {
            return t + h * x[2] / (x[2] - y[2]);
        }
        x = y;
        t += h;
    }
}

#[test]
fn abc_orbit_closes_after_one_period() {
    // H = -cos z - sin x is conserved in (x, z); the orbit circles (pi/2, 0)
    let x0 = [PI / 2.0 + 0.5, 1.0, 0.0];
    let period = orbit_period(x0);
    let p = AnalyticVelocity::new(|x: [f64; 3], _| abc_velocity(1.0, 1.0, 0.0, x));
    let end = advect_points(&p, &[x0], 0.0, period, 1e-3).unwrap()[0];
    let miss = ((end[0] - x0[0]).powi(2) + (end[2] - x0[2]).powi(2)).sqrt();
    assert!(miss <= 1e-4, "analytic miss {miss}");

    let g = Grid3::cube(64).unwrap();
    let u = VectorField3::from_fn(g, |x| abc_velocity(1.0, 1.0, 0.0, x));
    let grid_p = SnapshotSeries::steady(u).with_interpolation(Interpolation::Quintic);
    let end = advect_points(&grid_p, &[x0], 0.0, period, 1e-3).unwrap()[0];
    let miss = ((end[0] - x0[0]).powi(2) + (end[2] - x0[2]).powi(2)).sqrt();
    assert!(miss <= 1e-4, "grid miss {miss}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn translation_preserves_material_length(v in prop::array::uniform3(-2.0f64..2.0), n in 4usize..40) {
        let pts: Vec<[f64; 3]> = (0..n).map(|k| {
            let s = k as f64 * 0.05;
            [s.sin(), s, 0.3 * s * s]
        }).collect();
        let line = MaterialLine::new(pts, 0.0).unwrap();
        let p = AnalyticVelocity::new(move |_, _| v);
        let out = track_material_line(&line, &p, 0.7, 0.1).unwrap();
        prop_assert!((out.length() - line.length()).abs() <= 1e-12);
        prop_assert!((out.t - 0.7).abs() < 1e-15);
    }
}

/// Uniform strain `gamma (-x, -y, 2z)` about the box center with the swirl
/// carried by `omega_z = w0 e^{2 gamma t}`.
fn strain_velocity(gamma: f64, w0: f64, c: [f64; 3]) -> impl Fn([f64; 3], f64) -> [f64; 3] + Sync {
    move |x, t| {
        let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
        let w = w0 * (2.0 * gamma * t).exp();
        [-gamma * d[0] - 0.5 * w * d[1], -gamma * d[1] + 0.5 * w * d[0], 2.0 * gamma * d[2]]
    }
}

#[test]
fn uniform_strain_stretching_matches_closed_form() {
    let (gamma, w0, t2) = (0.5, 1.0, 0.4);
    // padded box: the segment stays well inside
    let g = Grid3::cube(16).unwrap();
    let c = g.center();
    let omega_at = |t: f64| VectorField3::from_fn(g, |_| [0.0, 0.0, w0 * (2.0 * gamma * t).exp()]);
    let w1 = omega_at(0.0);
    let u1 = VectorField3::from_fn(g, |x| strain_velocity(gamma, w0, c)(x, 0.0));
    let fields = LineFields::new(&w1, Some(&u1)).unwrap();
    let seed = [c[0] + 0.3, c[1] - 0.2, c[2] - 0.5];
    let traced = fields.trace(seed, 1.0, g.min_spacing() / 4.0, Direction::Forward).unwrap();
    let line = MaterialLine::from_vortex_line(&traced, DEFAULT_MARKERS, 0.0).unwrap();

    let p = AnalyticVelocity::new(strain_velocity(gamma, w0, c));
    let mut history = Vec::new();
    let mut current = line.clone();
    history.push(line_snapshot(&current, &fields).unwrap());
    for k in 1..=4 {
        let t = t2 * k as f64 / 4.0;
        current = track_material_line(&current, &p, t, 1e-3).unwrap();
        let u = VectorField3::from_fn(g, |x| strain_velocity(gamma, w0, c)(x, t));
        let f = LineFields::new(&omega_at(t), Some(&u)).unwrap();
        history.push(line_snapshot(&current, &f).unwrap());
    }
    let exact = (2.0 * gamma * t2).exp();
    let r = check_lemma2(&current, &w1, &omega_at(t2)).unwrap();
    for (sb, ratio) in r.s_beta.iter().zip(&r.ratios) {
        assert!((sb - exact).abs() <= 1e-4 * exact, "s_beta {sb}");
        assert!((ratio - exact).abs() <= 1e-4 * exact, "ratio {ratio}");
    }
    assert!((current.length() / line.length() - exact).abs() <= 1e-4 * exact);

    let rep = check_stretching_inequalities(&history, 1.0).unwrap();
    assert!(rep.pass, "{rep:?}");
    for row in &rep.rows {
        assert_eq!(row.exponent, 0.0);
        assert!(row.lemma2_gap <= 1e-6, "gap {}", row.lemma2_gap);
    }
}

#[test]
fn abc_material_line_lemma2_and_stretching() {
    let g = Grid3::cube(64).unwrap();
    let u0 = VectorField3::from_fn(g, abc);
    let w0 = curl(&u0);
    let f0 = LineFields::new(&w0, Some(&u0)).unwrap();
    let traced = f0.trace([0.1, 0.2, 0.3], 1.0, g.min_spacing() / 4.0, Direction::Forward).unwrap();
    let line = MaterialLine::from_vortex_line(&traced, DEFAULT_MARKERS, 0.0).unwrap();

    let mut history = Vec::new();
    let (end_state, end_pts) =
        evolve_with_markers(&u0, 0.5, 1e-3, 100, &line.alpha_points, Interpolation::Quintic, |_, s, u, pts| {
            let ml = MaterialLine { current_points: pts.to_vec(), t: s.t, ..line.clone() };
            let f = LineFields::new(&curl(u), Some(u))?;
            history.push(line_snapshot(&ml, &f)?);
            Ok(())
        })
        .unwrap();
    assert!((end_state.t - 0.5).abs() < 1e-12);
    let moved = MaterialLine { current_points: end_pts, t: end_state.t, ..line.clone() };
    let solver = EulerSolver::new(g);
    let w_end = solver.vorticity(&end_state);
    let r = check_lemma2(&moved, &w0, &w_end).unwrap();
    assert!(r.max_residual <= 1e-3, "lemma 2 residual {}", r.max_residual);
    assert!(r.excluded.is_empty());

    let rep = check_stretching_inequalities(&history, 1.0).unwrap();
    assert_eq!(rep.rows.len(), 6);
    assert!(rep.pass, "{:?}", rep.rows.iter().map(|r| (r.lower_margin, r.upper_margin)).collect::<Vec<_>>());
}

#[test]
fn kelvin_circulation_on_a_material_loop() {
    let g = Grid3::cube(32).unwrap();
    let u0 = VectorField3::from_fn(g, taylor_green_velocity);
    let loop_pts: Vec<[f64; 3]> = (0..128)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / 128.0;
            [1.0 + 0.5 * th.cos(), 2.0 + 0.5 * th.sin(), 0.7 + 0.2 * th.sin()]
        })
        .collect();
    let gamma0 = circulation(&loop_pts, &u0, Interpolation::Quintic).unwrap();
    let (state, pts) = evolve_with_markers(&u0, 0.5, 5e-3, 100, &loop_pts, Interpolation::Quintic, |_, _, _, _| Ok(()))
        .unwrap();
    let u1 = EulerSolver::new(g).velocity(&state);
    let gamma1 = circulation(&pts, &u1, Interpolation::Quintic).unwrap();
    assert!(gamma0.abs() > 0.1);
    assert!((gamma1 - gamma0).abs() <= 1e-4 * gamma0.abs(), "{gamma0} -> {gamma1}");
}

#[test]
fn taylor_green_timeline_rows() {
    let g = Grid3::cube(32).unwrap();
    let u0 = VectorField3::from_fn(g, taylor_green_velocity);
    let cfg = RunConfig { t_end: 1.0, dt: 1e-2, every: 10, policy: SeedPolicy::default() };
    let mut seen = 0;
    let out = run_with_diagnostics(&u0, &cfg, |_| {
        seen += 1;
        Ok(())
    })
    .unwrap();
    let tl = &out.timeline;
    assert_eq!(tl.len(), 1 + 100 / 10);
    assert_eq!(seen, tl.len());
    for w in tl.rows.windows(2) {
        assert!(w[1].t > w[0].t);
        assert!(w[1].bkm_integral >= w[0].bkm_integral);
    }
    // the recorded integral is the trapezoid of the recorded Omega
    let t = tl.column(|r| r.t);
    let om = tl.column(|r| r.omega);
    assert_eq!(tl.rows.last().unwrap().bkm_integral, vld_core::quad::trapezoid(&t, &om));
}

#[test]
fn abc_timeline_is_constant() {
    let g = Grid3::cube(32).unwrap();
    let u0 = VectorField3::from_fn(g, abc);
    let cfg = RunConfig { t_end: 0.5, dt: 1e-2, every: 10, policy: SeedPolicy::ThroughArgmax { length: 1.0 } };
    let out = run_with_diagnostics(&u0, &cfg, |_| Ok(())).unwrap();
    let r0 = out.timeline.rows[0];
    for r in &out.timeline.rows {
        assert!((r.omega - r0.omega).abs() <= 1e-6 * r0.omega, "Omega {} vs {}", r.omega, r0.omega);
        assert!((r.l_line - r0.l_line).abs() <= 1e-3 * r0.l_line);
        assert!((r.m_line - r0.m_line).abs() <= 1e-3 * r0.m_line.max(1.0));
    }
}

#[test]
fn lagrangian_seed_policy_runs() {
    let g = Grid3::cube(32).unwrap();
    let u0 = VectorField3::from_fn(g, taylor_green_velocity);
    let cfg = RunConfig { t_end: 0.2, dt: 1e-2, every: 5, policy: SeedPolicy::Lagrangian { length: 0.5 } };
    let out = run_with_diagnostics(&u0, &cfg, |_| Ok(())).unwrap();
    assert_eq!(out.timeline.len(), 5);
    assert!(out.timeline.rows.iter().all(|r| r.l_line.is_finite()));
}

#[test]
fn antiparallel_tubes_intensify() {
    let g = Grid3::cube(64).unwrap();
    let u0 = gen_field(FieldKind::default_tubes(), g).unwrap();
    let cfg = RunConfig { t_end: 2.0, dt: 1e-2, every: 20, policy: SeedPolicy::default() };
    let out = run_with_diagnostics(&u0, &cfg, |_| Ok(())).unwrap();
    let rows = &out.timeline.rows;
    let first = rows[0];
    let last = rows[rows.len() - 1];
    for r in rows {
        eprintln!(
            "t {:.2} Omega {:.6} E {:.9} L {:.4} M {:.4} ML {:.4}",
            r.t, r.omega, r.energy, r.l_line, r.m_line, r.ml_product
        );
    }
    assert!(last.omega > first.omega, "Omega {} -> {}", first.omega, last.omega);
    assert!((last.energy - first.energy).abs() <= 1e-6 * first.energy);
}
