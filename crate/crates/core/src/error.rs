use std::fmt;

/// Errors produced during problem construction, assembly and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    Domain(String),
    /// The power rule for the variable-order Caputo derivative is undefined
    /// for this exponent given the operator's integer ceiling.
    UnsupportedExponent { exponent: f64, ceiling: u32 },
    /// A problem definition failed validation.
    Validation(String),
    /// A linear solve or evaluation broke down numerically.
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnsupportedExponent { exponent, ceiling } => write!(
                f,
                "unsupported exponent: Caputo power rule is undefined for \
                 non-integer exponent {exponent} with ceiling m = {ceiling}"
            ),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
