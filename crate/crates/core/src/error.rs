use thiserror::Error;

/// Errors raised by the rating machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid pot function: {0}")]
    InvalidPot(String),

    #[error("argument `{name}` out of domain: {detail}")]
    Domain { name: &'static str, detail: String },

    #[error("invalid move at index {index}: {detail}")]
    InvalidMove { index: usize, detail: String },

    #[error("threshold A does not exist for pot function `{0}`")]
    NoThreshold(String),

    #[error("growth premise g(x) >= (a x)^2 fails at x = {x} for a = {a}")]
    GrowthPremise { a: f64, x: f64 },

    #[error("rewrite contract violated: {0}")]
    RewriteContract(String),

    /// `residual` is the unfinished path as transcript JSON.
    #[error("rewrite did not reach a fixpoint within {cap} rewrites")]
    RewriteCap { cap: usize, residual: String },

    #[error("search limits exceeded: {0}")]
    SearchLimits(String),

    #[error("malformed transcript: {0}")]
    Transcript(String),

    #[error("malformed pot table: {0}")]
    PotTable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { name, detail: detail.into() }
}
