use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hilbert space dimension {dim} exceeds the configured cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("numeric range exceeded at pair {pair}: {detail}")]
    NumericRange { pair: usize, detail: String },

    #[error("degenerate design target at pair {pair}: {detail}")]
    DegenerateTarget { pair: usize, detail: String },

    #[error("series diverges for s = {0} (requires s > 1)")]
    Divergent(f64),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
