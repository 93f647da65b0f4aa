use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("ring has {size} elements, above the cap of {cap}")]
    SizeLimit { size: u128, cap: u64 },

    #[error("element is not a unit")]
    NotAUnit,

    #[error("trace left the base ring Z_(p^n)")]
    NotInBaseRing,

    #[error("level {k} is outside 1..={max}")]
    BadLevel { k: u32, max: u32 },

    #[error("operands belong to different rings")]
    RingMismatch,

    #[error("{terms} terms requested, above the cap of {cap}")]
    TooLarge { terms: u128, cap: u128 },

    #[error("Welch bound needs N > K >= 1 (got N = {n}, K = {k})")]
    DegenerateDimensions { n: u128, k: u128 },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
