//! Checkers for the geometric no-blow-up criteria.
//!
//! Verdicts are `no_blowup_excluded` when every hypothesis of the criterion
//! holds on the supplied data, `conditions_violated` when one fails, and
//! `inconclusive` when the data or parameters fall outside what the
//! criterion covers. None of these is a statement about blow-up itself.

mod fit;
mod sequence;
mod theorem1;
mod theorem2;
mod verdict;

pub use fit::{fit_scaling, ExponentFit, ScalingFit, SensitivityRow, FLAT_GROWTH, MIN_FIT_ROWS, T_GRID};
pub use sequence::{
    build_doubling_sequence, contradiction_replay, series_verdict, GapBound, ReplayReport, SequenceModel, SequenceStop,
    SeriesVerdict, SERIES_TERMS,
};
pub use theorem1::{theorem1_check, Theorem1Report, Theorem1Sample};
pub use theorem2::{
    delta_exponent, scenario_library, scenario_preset, theorem2_check, ScalingScenario, TheoremKind, DEFAULT_C0_LOWER,
    DEFAULT_C0_UPPER, DEFAULT_C_BUDGET,
};
pub use verdict::{CriterionVerdict, Verdict};
