use thiserror::Error;

use crate::integrator::TrajectoryRecord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("vehicle index {index} out of range for ring of {len} vehicles")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("size mismatch: expected {expected} entries, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("Fourier mode {mode} out of range for {n} vehicles")]
    ModeOutOfRange { mode: usize, n: usize },

    #[error("growth rate undefined: {0}")]
    UndefinedGrowth(String),

    /// Non-finite state produced at `step`. `partial` holds the samples
    /// recorded before the failure when the error comes from a full run.
    #[error("integration diverged at step {step} (t = {time})")]
    Diverged {
        step: usize,
        time: f64,
        partial: Option<Box<TrajectoryRecord>>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::IndexOutOfRange { .. }
                | Error::SizeMismatch { .. }
                | Error::ModeOutOfRange { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}
