use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expanding factor must exceed 1, got {0}")]
    InvalidLambda(f64),

    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("transition matrix is not primitive")]
    NotPrimitive,

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("matrix is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("coincident points")]
    Coincident,

    #[error("pair lies outside the bracket domain")]
    OutsideBracketDomain,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("scale out of range: {0}")]
    ScaleOutOfRange(String),

    #[error("sample density {density:.3e} exceeds eps/4 = {limit:.3e}")]
    SampleTooSparse { density: f64, limit: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("non-finite distance")]
    NonFinite,

    #[error("empty sample set")]
    EmptySample,

    #[error("holonomy bound undefined at scale index m = {0} (requires lambda^(m-1) > 2)")]
    BoundUndefined(i32),

    #[error("inadmissible word")]
    Inadmissible,

    #[error("self-similarity validation failed: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
