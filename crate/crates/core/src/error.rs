use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid radix {radix} at level {level}: every radix must be at least 2")]
    InvalidRadix { level: usize, radix: u64 },

    #[error("depth {depth} too large: M_N overflows 64 bits")]
    DepthTooLarge { depth: usize },

    #[error("{what} = {value} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("radix systems do not match")]
    SystemMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("depth {depth} insufficient: counterexample needs at least {needed}")]
    DepthInsufficient { depth: usize, needed: usize },

    #[error("cannot parse radix spec {spec:?}: {reason}")]
    RadixSpec { spec: String, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: &'static str, value: u64, limit: u64) -> Error {
    Error::OutOfRange { what, value, limit }
}
