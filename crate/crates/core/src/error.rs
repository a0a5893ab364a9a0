use thiserror::Error;

/// Errors raised by the exact engines.
///
/// Every variant corresponds to a violated mathematical precondition; the
/// CLI maps all of them to exit code 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("division by a zero magnitude")]
    DivisionByZero,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("basis matrix is singular")]
    SingularBasis,

    #[error("weights must be strictly positive")]
    NonPositiveWeight,

    #[error("flag vectors are linearly dependent (vector {index})")]
    DependentVectors { index: usize },

    #[error("operation requires a discrete or trivial valuation, got {0}")]
    UnsupportedField(String),

    #[error("map is not surjective (rank {rank}, target dimension {target})")]
    NotSurjective { rank: usize, target: usize },

    #[error("base prime {0} has a norm ratio supported only at itself")]
    LaurentBaseViolation(u64),

    #[error("degree {0}: the restricted section does not extend")]
    DegreeTooSmall(usize),

    #[error("representative does not restrict to the given section on Y")]
    RepresentativeMismatch,

    #[error("coefficient {index} of the projected extension depends on T")]
    TDependentCoefficient { index: usize },

    #[error("rank {rank} exceeds the exact enumeration bound {bound}")]
    RankTooLarge { rank: usize, bound: usize },

    #[error("enumeration box of {0} vectors exceeds the configured limit")]
    EnumerationTooLarge(u128),

    #[error("linear program is {0}")]
    LinearProgram(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
