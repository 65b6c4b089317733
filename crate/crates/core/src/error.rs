use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An evaluation point sits on (or within the guard distance of) a pole.
    #[error("singular configuration: {0}")]
    Singularity(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("incomplete solve for sector {sector}: found {found} of {expected} solution sets")]
    IncompleteSolve {
        sector: String,
        found: usize,
        expected: usize,
    },

    #[error("complex pairons: {0}")]
    ComplexPairons(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Weight found outside the Hamming-weight-1 subspace.
    #[error("support leakage: {weight:.3e} of the probability lies outside the one-hot subspace")]
    Leakage { weight: f64 },
}

impl Error {
    /// Short machine-readable tag, used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Singularity(_) => "singularity",
            Error::UnsupportedRegime(_) => "unsupported-regime",
            Error::IncompleteSolve { .. } => "incomplete-solve",
            Error::ComplexPairons(_) => "complex-pairons",
            Error::NumericFailure(_) => "numeric-failure",
            Error::Leakage { .. } => "leakage",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
