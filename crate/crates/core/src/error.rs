use thiserror::Error;

/// Errors produced by the library.
///
/// `Unsupported` is the "not on this fast path" signal: it names the method a
/// caller should fall back to instead of silently substituting one.
/// `InexactDivision` and `Internal` indicate a broken invariant (a bug), not
/// bad input; they are surfaced as errors so cross-validation harnesses can
/// report them instead of aborting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid polygon spec: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what}: unsupported here, fall back to {fallback}")]
    Unsupported { what: String, fallback: String },

    #[error("inexact division in {context}: {numerator} is not a multiple of {denominator}")]
    InexactDivision {
        numerator: String,
        denominator: String,
        context: String,
    },

    #[error("unknown vertex: {0}")]
    UnknownVertex(String),

    #[error("configuration is not stable: {0}")]
    UnstableConfiguration(String),

    #[error("enumeration budget exceeded: {required} stable configurations > budget {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("cross-check mismatch: {0}")]
    CrossCheck(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn unsupported(what: impl Into<String>, fallback: impl Into<String>) -> Self {
        Error::Unsupported {
            what: what.into(),
            fallback: fallback.into(),
        }
    }
}
