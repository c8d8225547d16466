use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),

    #[error("vector norm is zero")]
    ZeroVector,

    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("shape mismatch in {context}: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix has rank above one (singular value ratio {ratio:.3e})")]
    RankTooHigh { ratio: f64 },

    #[error("reflecting coefficient has modulus {modulus}, expected 1")]
    NonUnitModulus { modulus: f64 },

    #[error("logarithm argument {argument:.3e} is not positive")]
    LogDomain { argument: f64 },

    #[error("value {0} outside [0, 2pi)")]
    OutOfRange(f64),

    #[error("dual bracketing failed: trace still exceeds budget at lambda = {lambda:.3e}")]
    BracketingFailure { lambda: f64 },

    #[error("phase quantization needs at least 2 levels, got {0}")]
    BadLevelCount(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
