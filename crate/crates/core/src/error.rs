use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("slot {slot}: expected a vector of length {expected}, got {got}")]
    DimensionMismatch {
        slot: usize,
        expected: usize,
        got: usize,
    },

    #[error("degree mismatch: form has degree {form}, exponents cover {exponents} slots")]
    DegreeMismatch { form: usize, exponents: usize },

    #[error("invalid exponent tuple: {0}")]
    InvalidExponents(String),

    #[error("cannot parse exponent token `{token}`: {reason}")]
    ExponentParse { token: String, reason: String },

    #[error("{what} = {value} is outside {range}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("the form is identically zero")]
    ZeroForm,

    #[error("all vectors of the family are zero")]
    ZeroFamily,

    #[error("empty vector family")]
    EmptyFamily,

    #[error("{n} vectors exceed the exact enumeration limit of {max}")]
    TooManyVectors { n: usize, max: usize },

    #[error("vector {index} has length {got}, expected {expected}")]
    RaggedFamily {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid interpolation input: {0}")]
    Interpolation(String),

    #[error("exact sup norm unaffordable for dims {dims:?}: 2^{bits} vertices exceed 2^{max_bits}")]
    Unaffordable {
        dims: Vec<usize>,
        bits: usize,
        max_bits: usize,
    },

    #[error("invalid budget: {0}")]
    InvalidBudget(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
