use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("wrong reference frame: expected {expected}, found {found}")]
    WrongFrame { expected: String, found: String },
    #[error("arclength {s} outside path [0, {length}]")]
    OutOfPath { s: f64, length: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time step {0} s outside (0, 0.1]")]
    BadTimeStep(f64),
    #[error("bad window {window} for series of length {len}")]
    BadWindow { window: usize, len: usize },
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("missing visibility flags in run log")]
    MissingVisibility,
    #[error("mismatched scenarios: {0}")]
    MismatchedScenarios(String),
    #[error("unknown catalog id {0} (valid: 1-12)")]
    UnknownCatalogId(u32),
    #[error("invalid config at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error("log format: {0}")]
    LogFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
