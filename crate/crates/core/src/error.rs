use thiserror::Error;

/// Which density-operator invariant an input violated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateViolation {
    /// Largest entrywise deviation from Hermiticity.
    NotHermitian(f64),
    /// Most negative eigenvalue.
    NotPositive(f64),
    /// The offending trace (real part).
    BadTrace(f64),
}

impl std::fmt::Display for StateViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateViolation::NotHermitian(dev) => write!(f, "not Hermitian (deviation {dev:e})"),
            StateViolation::NotPositive(min) => {
                write!(f, "not positive semidefinite (min eigenvalue {min:e})")
            }
            StateViolation::BadTrace(tr) => write!(f, "trace is {tr}, expected 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square with dim >= 1 (got {entries} entries for dim {dim})")]
    BadShape { dim: usize, entries: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid qudit dimension {0}; need d >= 2")]
    InvalidDimension(usize),

    #[error("tolerance `{name}` = {value} is outside (0, 1e-6]")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("invalid state: {0}")]
    InvalidState(StateViolation),

    #[error("matrix is not an orthogonal projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },

    #[error("observable must annihilate the vacuum (entry ({row}, {col}) is nonzero)")]
    VacuumNotAnnihilated { row: usize, col: usize },

    #[error("eigenvalue {value} is not in the spectrum (nearest: {nearest})")]
    UnknownEigenvalue { value: f64, nearest: f64 },

    #[error("duplicate selector {0} in omega set")]
    DuplicateSelector(f64),

    #[error("Kraus channel needs at least one element")]
    EmptyChannel,

    #[error("not a quantum operation: sum of E^dagger E exceeds identity by {excess:e}")]
    InvalidChannel { excess: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
