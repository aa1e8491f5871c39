use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("term with exponent {exponent:?} is not divisible by {divisor:?}")]
    NotDivisible { exponent: Vec<u32>, divisor: Vec<u32> },

    #[error("precision exhausted: need degree {needed}, have {available}")]
    InsufficientPrecision { needed: u32, available: u32 },

    #[error("generator {index} is zero")]
    ZeroGenerator { index: usize },

    #[error("scope {scope} out of range for {nvars} variables")]
    ScopeOutOfRange { scope: usize, nvars: usize },

    #[error("invalid monomial order: {0}")]
    InvalidOrder(String),

    #[error("empty generator list")]
    EmptyPresentation,

    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input document; `path` locates the offending value.
    #[error("{origin}: invalid value at `{path}`: {message}")]
    Schema {
        origin: String,
        path: String,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
