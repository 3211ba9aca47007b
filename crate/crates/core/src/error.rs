use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("variable mismatch: '{0}' vs '{1}'")]
    VariableMismatch(String, String),
    #[error("log-power cap {cap} exceeded (got {got})")]
    LogCapOverflow { cap: u32, got: u32 },
    #[error("point {0} lies on the branch cut")]
    BranchCut(String),
    #[error("region violation: {0}")]
    Region(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("spectrum: {0}")]
    Spectrum(String),
    #[error("grade cutoff {cutoff} exceeded (needed {needed})")]
    Cutoff { cutoff: u32, needed: u32 },
    #[error("reduction failure: {0}")]
    Reduction(String),
    #[error("ladder violation: {0}")]
    Ladder(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
