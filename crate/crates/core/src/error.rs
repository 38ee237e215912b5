use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator spaces differ: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Fock level {level} exceeds cutoff {cutoff}")]
    LevelOutOfRange { level: usize, cutoff: usize },

    #[error("partition classes {first} and {second} share eigenvalue {eigenvalue}")]
    DegenerateClasses {
        first: usize,
        second: usize,
        eigenvalue: f64,
    },

    #[error("integrator aborted at t = {time}: {reason}; retry with a smaller dt")]
    IntegratorUnstable { time: f64, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
