//! Vortex lines: tracing through the direction field, along-line quantities,
//! and the magnitude-along-line identity check.

mod argmax;
mod dump;
mod fields;
mod lemma1;
mod trace;

pub use argmax::find_max_vorticity_point;
pub use dump::{write_line_csv, LINE_CSV_HEADER};
pub use fields::{line_diagnostics, summarize, LineFields, LINE_INTERP};
pub(crate) use fields::oriented_divergence;
pub use lemma1::{check_lemma1, corridor_check, CorridorReport, Lemma1Report};
pub use trace::{trace_line, trace_source, AnalyticDirection, Direction, DirectionSource};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxLength,
    LeftValidMask,
    ClosedLoop,
}

/// One point of a traced line with its geometric and flow quantities.
///
/// Tracing fills `position`, `s` and `xi`; the remaining fields are zero until
/// the line is annotated against grid fields.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LineSample {
    pub position: [f64; 3],
    pub s: f64,
    pub omega_mag: f64,
    pub xi: [f64; 3],
    pub div_xi: f64,
    pub kappa: f64,
    pub normal: [f64; 3],
    /// `u . xi`
    pub u_tan: f64,
    /// `u . n`
    pub u_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexLine {
    pub samples: Vec<LineSample>,
    /// Arc-length step between consecutive samples.
    pub step: f64,
    pub seed: [f64; 3],
    pub terminated_reason: Termination,
    /// Total arc length; for closed loops this includes the closing gap.
    pub length: f64,
}

impl VortexLine {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn arc_values(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.s).collect()
    }

    pub fn end(&self) -> [f64; 3] {
        self.samples.last().map(|p| p.position).unwrap_or(self.seed)
    }
}

/// Per-line summary used by the blow-up criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineDiagnostics {
    pub arc_length: f64,
    pub max_omega: f64,
    /// `max(max |div xi|, max kappa)`
    pub m_line: f64,
    /// Signed `integral div xi ds`.
    pub div_integral: f64,
    pub abs_div_integral: f64,
    /// `max u_tan - min u_tan`
    pub u_xi_line: f64,
    /// `max |u_norm|`
    pub u_n_line: f64,
    /// `|omega|` at the first and last samples.
    pub omega_start: f64,
    pub omega_end: f64,
}
