use thiserror::Error;

use crate::expr::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("division by zero during evaluation")]
    DivisionByZero,

    #[error("point has {got} coordinates but the expression uses x{need}")]
    PointTooShort { need: usize, got: usize },

    #[error("coefficient vector is empty")]
    EmptyCoefficients,

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("coefficients sum to {sum}, expected 1")]
    CoefficientSum { sum: String },

    #[error("last coefficient is {found}, expected 1/{n}")]
    LastCoefficient { found: String, n: usize },

    #[error("beta = {beta} is outside 1..={max}")]
    BetaOutOfRange { beta: usize, max: usize },

    #[error("dimension must be even, got {0}")]
    OddDimension(usize),

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { got: usize, min: usize },

    #[error("expression uses x{used} but the dimension is {n}")]
    DimensionMismatch { used: usize, n: usize },

    #[error("{values} values but {probs} probabilities")]
    LengthMismatch { values: usize, probs: usize },

    #[error("probability at position {index} is {value}, outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: String },

    #[error("probabilities sum to {0}")]
    ProbabilitySum(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
