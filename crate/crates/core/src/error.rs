use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("network has no agents")]
    EmptyNetwork,

    #[error("invalid network: {}", .0.join("; "))]
    InvalidNetwork(Vec<String>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("evaluation point {point} is at a pole (nearest eigenvalue {nearest})")]
    AtPole {
        point: Complex<f64>,
        nearest: Complex<f64>,
    },

    #[error("realization is not minimal: {0}")]
    NotMinimal(String),

    #[error("roots of the zero polynomial are undefined")]
    ZeroPolynomial,

    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,

    #[error("normal-rank sampling failed: every sample point hit a pole")]
    SamplingFailure,

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("block size must be at least 1")]
    InvalidBlockSize,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
