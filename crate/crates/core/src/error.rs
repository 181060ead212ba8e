use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid symbol: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("requested order {requested} is below the symbol's effective order {effective}")]
    OrderTooSmall { requested: usize, effective: usize },

    #[error("root finding did not reach the residual tolerance: {0}")]
    IllConditioned(String),

    #[error("denominator is identically zero")]
    ZeroDenominatorIdentically,

    #[error("boundary-sampled winding {sampled} disagrees with zero count {counted}")]
    WindingDisagreement { sampled: i64, counted: i64 },

    #[error("the point is not a regular singular point of the operator")]
    NotRegular,

    #[error("Frobenius recurrence obstructed at exponent {exponent}")]
    ResonanceObstruction { exponent: i64 },

    #[error("operation needs an exactly representable point")]
    NotExactPoint,

    #[error("w = 0 is excluded")]
    WZeroExcluded,

    #[error("singular-value trace has no clear gap: {0}")]
    ConvergenceAmbiguous(String),

    #[error("internal inconsistency between derivations: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
