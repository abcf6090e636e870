use thiserror::Error;

/// Errors surfaced by the exact-arithmetic engine and the protocol layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scale must be non-negative, got {0}")]
    NegativeScale(i64),
    #[error("dyadic scale {0} exceeds the configured limit {1}")]
    ScaleOverflow(u64, u32),
    #[error("evaluation point {0} lies outside [0, 1]")]
    OutOfDomain(String),
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(String, String),
    #[error("invalid PL map: {0}")]
    InvalidMap(String),
    #[error("map does not fix {0}: transcript violates the protocol")]
    NotFixed(String),
    #[error("membership violation: {0}")]
    Membership(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("attack failed: {0}")]
    Attack(String),
    #[error("element is not an A_s B_s product")]
    NotInProduct,
}

pub type Result<T> = std::result::Result<T, Error>;
