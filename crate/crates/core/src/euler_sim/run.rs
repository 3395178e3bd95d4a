use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::particles::{advect_points, SnapshotSeries};
use super::solver::{EulerSolver, SimState};
use crate::error::{Error, Result};
use crate::field::VectorField3;
use crate::interp::Interpolation;
use crate::quad::cumulative_trapezoid;
use crate::spectral::curl;
use crate::vortex_line::{find_max_vorticity_point, summarize, LineFields, VortexLine, LINE_INTERP};

pub const TIMELINE_HEADER: &str = "t,Omega,bkm_integral,energy,U_max,L_line,M_line,U_xi,U_n,ML_product";

/// How the diagnostic vortex line is seeded at each recorded step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedPolicy {
    /// Re-traced through the current vorticity argmax, `length` in total.
    ThroughArgmax { length: f64 },
    /// Through the argmax, with length a fraction of the smallest box side.
    ArgmaxFraction { fraction: f64 },
    /// Seed starts at the first argmax and is carried by the flow.
    Lagrangian { length: f64 },
}

impl Default for SeedPolicy {
    fn default() -> Self {
        SeedPolicy::ThroughArgmax { length: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub t_end: f64,
    pub dt: f64,
    pub every: usize,
    pub policy: SeedPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TimelineRow {
    pub t: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub bkm_integral: f64,
    pub energy: f64,
    #[serde(rename = "U_max")]
    pub u_max: f64,
    #[serde(rename = "L_line")]
    pub l_line: f64,
    #[serde(rename = "M_line")]
    pub m_line: f64,
    #[serde(rename = "U_xi")]
    pub u_xi: f64,
    #[serde(rename = "U_n")]
    pub u_n: f64,
    #[serde(rename = "ML_product")]
    pub ml_product: f64,
}

impl TimelineRow {
    fn values(&self) -> [f64; 10] {
        [
            self.t,
            self.omega,
            self.bkm_integral,
            self.energy,
            self.u_max,
            self.l_line,
            self.m_line,
            self.u_xi,
            self.u_n,
            self.ml_product,
        ]
    }

    fn from_values(v: [f64; 10]) -> Self {
        Self {
            t: v[0],
            omega: v[1],
            bkm_integral: v[2],
            energy: v[3],
            u_max: v[4],
            l_line: v[5],
            m_line: v[6],
            u_xi: v[7],
            u_n: v[8],
            ml_product: v[9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsTimeline {
    pub rows: Vec<TimelineRow>,
}

impl DiagnosticsTimeline {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, f: impl Fn(&TimelineRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{TIMELINE_HEADER}")?;
        for r in &self.rows {
            let cells: Vec<String> = r.values().iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty timeline".into()))??;
        if header.trim() != TIMELINE_HEADER {
            return Err(Error::Format(format!("unexpected timeline header {header:?}")));
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("timeline row {}: {e}", k + 1)))?;
            let arr: [f64; 10] = vals
                .try_into()
                .map_err(|_| Error::Format(format!("timeline row {} does not have 10 columns", k + 1)))?;
            rows.push(TimelineRow::from_values(arr));
        }
        Ok(Self { rows })
    }
}

/// What a run hands to its observer at every recorded step.
pub struct Snapshot<'a> {
    pub step: usize,
    pub state: &'a SimState,
    pub u: &'a VectorField3,
    pub omega: &'a VectorField3,
    pub row: &'a TimelineRow,
    pub line: Option<&'a VortexLine>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub timeline: DiagnosticsTimeline,
    /// Diagnostic line per recorded row, `None` where tracing failed.
    pub lines: Vec<Option<VortexLine>>,
    pub final_state: SimState,
}

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!("t_end = {t_end}, dt = {dt}")));
    }
    let n = (t_end / dt).round();
    if (n * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
        return Err(Error::Config(format!("t_end = {t_end} is not a whole number of steps dt = {dt}")));
    }
    Ok(n as usize)
}

/// Traces the diagnostic line and fills the line columns; NaN when no line
/// can be traced (vanishing vorticity, seed outside the valid region).
fn line_columns(
    omega: &VectorField3,
    u: &VectorField3,
    seed: [f64; 3],
    length: f64,
    row: &mut TimelineRow,
) -> Option<VortexLine> {
    let grid = *omega.grid();
    let traced = LineFields::new(omega, Some(u))
        .and_then(|f| f.trace_through(seed, length, grid.min_spacing() / 4.0))
        .and_then(|line| summarize(&line).map(|d| (line, d)));
    match traced {
        Ok((line, d)) => {
            row.l_line = line.length;
            row.m_line = d.m_line;
            row.u_xi = d.u_xi_line;
            row.u_n = d.u_n_line;
            row.ml_product = d.m_line * line.length;
            Some(line)
        }
        Err(_) => {
            row.l_line = f64::NAN;
            row.m_line = f64::NAN;
            row.u_xi = f64::NAN;
            row.u_n = f64::NAN;
            row.ml_product = f64::NAN;
            None
        }
    }
}

/// Evolves `initial` and records a timeline row every `every` steps,
/// starting with the initial state.
pub fn run_with_diagnostics(
    initial: &VectorField3,
    cfg: &RunConfig,
    mut on_snapshot: impl FnMut(&Snapshot) -> Result<()>,
) -> Result<RunOutput> {
    if cfg.every == 0 {
        return Err(Error::Config("every must be at least 1".into()));
    }
    let n_steps = step_count(cfg.t_end, cfg.dt)?;
    let grid = *initial.grid();
    let length = match cfg.policy {
        SeedPolicy::ThroughArgmax { length } | SeedPolicy::Lagrangian { length } => length,
        SeedPolicy::ArgmaxFraction { fraction } => {
            let l = grid.lengths();
            fraction * l[0].min(l[1]).min(l[2])
        }
    };
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Config(format!("line length {length} must be positive")));
    }
    let lagrangian = matches!(cfg.policy, SeedPolicy::Lagrangian { .. });

    let solver = EulerSolver::new(grid);
    let mut state = solver.init(initial, 0.0)?;
    let mut u = solver.velocity(&state);
    let mut carried: Option<[f64; 3]> = None;
    let mut rows: Vec<TimelineRow> = Vec::new();
    let mut lines = Vec::new();

    for step in 0..=n_steps {
        if step % cfg.every == 0 {
            let omega = curl(&u);
            let (argmax, om) = find_max_vorticity_point(&omega);
            let seed = if lagrangian { *carried.get_or_insert(argmax) } else { argmax };
            let mut row = TimelineRow {
                t: state.t,
                omega: om,
                energy: solver.energy(&state),
                u_max: u.max_magnitude(),
                ..Default::default()
            };
            let line = line_columns(&omega, &u, seed, length, &mut row);
            rows.push(row);
            let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
            let w: Vec<f64> = rows.iter().map(|r| r.omega).collect();
            let last = rows.len() - 1;
            rows[last].bkm_integral = *cumulative_trapezoid(&t, &w).last().expect("non-empty");
            on_snapshot(&Snapshot { step, state: &state, u: &u, omega: &omega, row: &rows[last], line: line.as_ref() })?;
            lines.push(line);
        }
        if step == n_steps {
            break;
        }
        let mut next = solver.step(&state, cfg.dt)?;
        next.t = (step + 1) as f64 * cfg.dt;
        let u_next = solver.velocity(&next);
        if let Some(x) = carried {
            let series = SnapshotSeries::new(vec![state.t, next.t], vec![u.clone(), u_next.clone()])?
                .with_interpolation(LINE_INTERP);
            carried = Some(advect_points(&series, &[x], state.t, next.t, cfg.dt)?[0]);
        }
        state = next;
        u = u_next;
    }
    Ok(RunOutput { timeline: DiagnosticsTimeline { rows }, lines, final_state: state })
}

/// Evolves `initial` while carrying `points` with the computed velocity,
/// linear in time across each step. `on_record(step, state, u, points)` runs
/// at the start and every `every` steps. Returns the final state and points.
pub fn evolve_with_markers(
    initial: &VectorField3,
    t_end: f64,
    dt: f64,
    every: usize,
    points: &[[f64; 3]],
    interp: Interpolation,
    mut on_record: impl FnMut(usize, &SimState, &VectorField3, &[[f64; 3]]) -> Result<()>,
) -> Result<(SimState, Vec<[f64; 3]>)> {
    if every == 0 {
        return Err(Error::Config("every must be at least 1".into()));
    }
    let n_steps = step_count(t_end, dt)?;
    let solver = EulerSolver::new(*initial.grid());
    let mut state = solver.init(initial, 0.0)?;
    let mut u = solver.velocity(&state);
    let mut pts = points.to_vec();
    for step in 0..=n_steps {
        if step % every == 0 {
            on_record(step, &state, &u, &pts)?;
        }
        if step == n_steps {
            break;
        }
        let mut next = solver.step(&state, dt)?;
        next.t = (step + 1) as f64 * dt;
        let u_next = solver.velocity(&next);
        let series = SnapshotSeries::new(vec![state.t, next.t], vec![u, u_next.clone()])?.with_interpolation(interp);
        pts = advect_points(&series, &pts, state.t, next.t, dt)?;
        state = next;
        u = u_next;
    }
    Ok((state, pts))
}

/// All diagnostic lines in one table, prefixed with the row index and time.
pub fn write_lines_csv<W: Write>(mut w: W, timeline: &DiagnosticsTimeline, lines: &[Option<VortexLine>]) -> Result<()> {
    writeln!(w, "row,t,{}", crate::vortex_line::LINE_CSV_HEADER)?;
    for (k, (row, line)) in timeline.rows.iter().zip(lines).enumerate() {
        let Some(line) = line else { continue };
        for p in &line.samples {
            let vals = [
                row.t,
                p.s,
                p.position[0],
                p.position[1],
                p.position[2],
                p.omega_mag,
                p.div_xi,
                p.kappa,
                p.u_tan,
                p.u_norm,
            ];
            let cells: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{k},{}", cells.join(","))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid3;

    #[test]
    fn step_count_checks_divisibility() {
        assert_eq!(step_count(0.1, 1e-3).unwrap(), 100);
        assert_eq!(step_count(1.0, 0.25).unwrap(), 4);
        assert!(step_count(1.0, 0.3).is_err());
        assert!(step_count(1.0, 0.0).is_err());
    }

    #[test]
    fn timeline_csv_round_trip() {
        let tl = DiagnosticsTimeline {
            rows: vec![
                TimelineRow { t: 0.0, omega: 1.0 / 3.0, l_line: f64::NAN, ..Default::default() },
                TimelineRow { t: 0.1, omega: 2.0, bkm_integral: 0.1, ..Default::default() },
            ],
        };
        let mut buf = Vec::new();
        tl.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(TIMELINE_HEADER));
        let back = DiagnosticsTimeline::read_csv(&buf[..]).unwrap();
        assert_eq!(back.rows[0].omega, 1.0 / 3.0);
        assert!(back.rows[0].l_line.is_nan());
        assert_eq!(back.rows[1], tl.rows[1]);
    }

    #[test]
    fn zero_field_rows_have_nan_lines() {
        let g = Grid3::cube(8).unwrap();
        let cfg = RunConfig { t_end: 0.2, dt: 0.1, every: 1, policy: SeedPolicy::default() };
        let out = run_with_diagnostics(&VectorField3::zeros(g), &cfg, |_| Ok(())).unwrap();
        assert_eq!(out.timeline.len(), 3);
        assert!(out.timeline.rows.iter().all(|r| r.omega == 0.0 && r.l_line.is_nan()));
        assert!((out.timeline.rows[2].t - 0.2).abs() < 1e-15);
    }
}
