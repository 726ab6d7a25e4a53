//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or analyzing a chain.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration, instance size, or parameter is outside its domain.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Enumerating the state space would exceed the configured cap.
    #[error("state space has {states} configurations, exceeding cap {cap}")]
    CapExceeded {
        /// Number of configurations C(n,k) that would be enumerated.
        states: u128,
        /// The configured enumeration cap.
        cap: u64,
    },

    /// A numerical guard tripped (degenerate denominator, failed bisection,
    /// row normalization off, non-convergent quadrature).
    #[error("numerical guard: {0}")]
    Numerical(String),

    /// Artifact or cache I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(format!("serialization failed: {e}"))
    }
}

impl Error {
    /// Shorthand for [`Error::Invalid`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Shorthand for [`Error::Numerical`].
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code used by the command-line interface: usage errors
    /// map to 2, cap overruns to 3, numerical guards to 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Io(_) => 2,
            Error::CapExceeded { .. } => 3,
            Error::Numerical(_) => 4,
        }
    }
}
