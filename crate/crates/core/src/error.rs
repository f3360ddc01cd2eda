use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("overlap matrix not positive definite at N={basis_size} with {precision_bits} bits; raise the working precision")]
    PrecisionInsufficient {
        basis_size: usize,
        precision_bits: u32,
    },

    #[error("{solver} did not converge: {detail}")]
    NonConvergence { solver: &'static str, detail: String },

    #[error("series too short: need {needed} coefficients, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("grid too coarse: {requested} eigenvalues requested from {points} interior points")]
    GridTooCoarse { requested: usize, points: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
