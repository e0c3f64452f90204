use thiserror::Error;

/// Errors raised while building states, operators and QFI values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("truncation leakage {leakage:.3e} at dim {dim} exceeds {threshold:.0e}")]
    Leakage {
        leakage: f64,
        dim: usize,
        threshold: f64,
    },

    #[error("Fock index {n} out of range for dim {dim} (need n < dim - 1)")]
    FockIndex { n: usize, dim: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("Hermitian eigensolver did not converge on a {0}x{0} block")]
    EigenFailure(usize),

    #[error("loss channel truncation discards weight {0:.3e}")]
    KrausTruncation(f64),

    #[error("ancilla oracle needs {0} basis states, limit is {1}")]
    TooLarge(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Whether the error stems from truncation or numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Leakage { .. }
                | Error::EigenFailure(_)
                | Error::KrausTruncation(_)
                | Error::TooLarge(..)
                | Error::InvalidDensity(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
