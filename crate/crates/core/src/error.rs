use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("non-finite value {value} at x = {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("argument {0} outside the function domain")]
    Domain(String),

    #[error("P is not absolutely continuous with respect to Q at {0}")]
    AbsoluteContinuity(String),

    #[error("operation not supported for {0} distributions")]
    UnsupportedKind(&'static str),

    #[error("iteration cap of {0} candidates reached before the stopping rule fired")]
    IterationCap(u64),

    #[error("sampled index exceeds the u64 range (success probability {beta:e})")]
    Overflow { beta: f64 },

    #[error("accumulated numerical error drove the tail mass to {0:e}")]
    NegativeTail(f64),

    #[error("index {index} outside a table of {len} lengths")]
    OutOfRange { index: u64, len: usize },

    #[error("tail mass {0:e} is positive but no tail length ceiling was supplied")]
    UnboundedTail(f64),

    #[error("order {0} outside the admissible range {1}")]
    OrderOutOfRange(f64, &'static str),

    #[error("epsilon {epsilon} outside (0, {max}]")]
    EpsilonOutOfRange { epsilon: f64, max: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
