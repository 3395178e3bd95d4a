use thiserror::Error;

/// Errors raised across the diagnostics library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty direction field")]
    EmptyDirectionField,

    #[error("seed in irrotational region")]
    SeedOutsideMask,

    #[error("line leaves N: sample {index} has |omega| = {value}")]
    LineLeavesN { index: usize, value: f64 },

    #[error("line too short: {0} samples, need at least 2")]
    LineTooShort(usize),

    #[error("vorticity not compactly supported; free-space BS invalid (max |omega| {edge:e} within margin vs peak {peak:e})")]
    NotCompactlySupported { edge: f64, peak: f64 },

    #[error("vorticity has nonzero mean: [{0:e}, {1:e}, {2:e}]")]
    NonzeroMean(f64, f64, f64),

    #[error("CFL violation: dt = {dt:e} exceeds limit {limit:e}; suggested dt = {suggested:e}")]
    Cfl { dt: f64, limit: f64, suggested: f64 },

    #[error("omega model not monotone increasing: {0}")]
    NotMonotone(String),

    #[error("proof machinery inapplicable: {0}")]
    ProofInapplicable(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
