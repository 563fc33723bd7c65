use alloc::string::String;

/// Errors raised by the dynamical kernels.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("point does not belong to the system: {0}")]
    InvalidPoint(&'static str),
    #[error("observable is not defined on this point: {0}")]
    InvalidObservable(&'static str),
    #[error("rotation step does not generate its group")]
    NonErgodicRotation,
    #[error("group order {0} exceeds the supported maximum of 360")]
    OrderTooLarge(u64),
    #[error("undecidable: {0}")]
    Undecidable(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// Failure to read one of the textual descriptions (frequencies, systems,
/// observables, weights).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

impl ParseError {
    pub(crate) fn new(input: &str, reason: impl Into<String>) -> Self {
        ParseError {
            input: input.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
