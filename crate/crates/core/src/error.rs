use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} requires the strong-coupling regime (4nR^2 > 1)")]
    WrongRegime(&'static str),

    #[error("step count {given} too small, need at least {required}")]
    TooFewSteps { given: usize, required: usize },

    #[error("bath window [{omega_min}, {omega_max}] captures only {captured:.5} of the Lorentzian mass (need {required})")]
    WindowTooNarrow {
        omega_min: f64,
        omega_max: f64,
        captured: f64,
        required: f64,
    },

    #[error("pair class {pair} is not available for {reason}")]
    IncompatiblePair { pair: &'static str, reason: String },

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("concurrence series undersampled: jump of {max_jump:.4} between samples (limit {limit})")]
    Undersampled { max_jump: f64, limit: f64 },

    #[error("grid too large: {rows} rows exceeds limit of {limit}")]
    GridTooLarge { rows: u128, limit: u128 },

    #[error("config: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
