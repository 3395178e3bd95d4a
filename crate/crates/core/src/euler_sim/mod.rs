//! Pseudo-spectral Euler evolution, Lagrangian markers, material vortex
//! lines, and the diagnostics timeline.
//!
//! The momentum equation is taken with the usual pressure sign,
//! `u_t + (u . grad) u = -grad p`, under which kinetic energy is conserved.

mod material;
mod particles;
mod run;
mod solver;

pub use material::{
    check_lemma2, check_stretching_inequalities, circulation, line_snapshot, track_material_line, Lemma2Report,
    LineSnapshot, MaterialLine, StretchingReport, StretchingRow, DEFAULT_MARKERS, SPACING_WARN_FACTOR,
    STRETCHING_TOLERANCE,
};
pub use particles::{advect_particles, advect_points, AnalyticVelocity, SnapshotSeries, VelocityProvider};
pub use run::{
    evolve_with_markers, run_with_diagnostics, write_lines_csv, DiagnosticsTimeline, RunConfig, RunOutput, SeedPolicy, Snapshot,
    TimelineRow, TIMELINE_HEADER,
};
pub use solver::{EulerSolver, SimState, DEFAULT_CFL};
