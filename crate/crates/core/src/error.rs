use thiserror::Error;

/// Errors raised by the library. Every variant has a stable short name (see
/// [`Error::name`]) that the command-line frontend echoes on failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rho^2 = {rho}^2 is not congruent to D = {d} modulo 4N = {modulus}")]
    CongruenceViolation { rho: i64, d: i64, modulus: i64 },

    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(i64),

    #[error("weight parameter k = {0} must be at least 2")]
    BadWeight(i64),

    #[error("level N = {level} does not divide the leading coefficient {leading}")]
    LevelMismatch { level: i64, leading: String },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("requested precision cannot be reached: {0}")]
    PrecisionUnreachable(String),

    #[error("evaluation point must satisfy t > 0")]
    NonPositiveT,

    #[error("adaptive quadrature stalled: {0}")]
    QuadratureNonConvergent(String),

    #[error("truncated lattice sum did not settle: {0}")]
    SeriesNonConvergent(String),

    #[error("period vector is missing coset {0}")]
    IncompleteVector(String),

    #[error("weight parameter k = {0} must be odd")]
    EvenWeight(i64),

    #[error("weight parameter k = {0} must be even")]
    OddWeight(i64),

    #[error("no vanishing result on record for S_{two_k}^+({level}); pass the plus-space override to assume it")]
    HypothesisUnknown { two_k: i64, level: i64 },

    #[error("D = {d} is not congruent to 1 modulo 4N = {modulus}")]
    BadCongruence { d: i64, modulus: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::CongruenceViolation { .. } => "CongruenceViolation",
            Error::SquareDiscriminant(_) => "SquareDiscriminant",
            Error::BadWeight(_) => "BadWeight",
            Error::LevelMismatch { .. } => "LevelMismatch",
            Error::NotFundamental(_) => "NotFundamental",
            Error::PrecisionUnreachable(_) => "PrecisionUnreachable",
            Error::NonPositiveT => "NonPositiveT",
            Error::QuadratureNonConvergent(_) => "QuadratureNonConvergent",
            Error::SeriesNonConvergent(_) => "SeriesNonConvergent",
            Error::IncompleteVector(_) => "IncompleteVector",
            Error::EvenWeight(_) => "EvenWeight",
            Error::OddWeight(_) => "OddWeight",
            Error::HypothesisUnknown { .. } => "HypothesisUnknown",
            Error::BadCongruence { .. } => "BadCongruence",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
