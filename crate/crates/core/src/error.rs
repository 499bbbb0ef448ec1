use alloc::string::String;

/// Failure modes shared by every operation in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Shapes, dimensions or resolutions do not fit together.
    #[error("argument error: {0}")]
    Argument(String),
    /// A random-offset family is shorter than the grid it must cover.
    #[error("length error: need {needed} offsets, have {available}")]
    Length { needed: usize, available: usize },
    /// A fine path does not coarsen to the path a trajectory was built from.
    #[error("consistency error: {0}")]
    Consistency(String),
    /// Experiment configuration violates a precondition; names the field.
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: &'static str, reason: String },
    /// A non-finite value appeared during simulation.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A test function has no registered antiderivative.
    #[error("unsupported function: {0}")]
    Unsupported(String),
    /// A log-log fit could not be formed.
    #[error("fit error: {0}")]
    Fit(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}
