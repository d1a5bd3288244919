use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Structurally malformed input (wrong column count, bad header, bad number).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input that parsed but violates a data contract (unknown label, duplicate id, ...).
    #[error("invalid data: {0}")]
    Validation(String),

    /// A function argument outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Bad run configuration or hyperparameter file.
    #[error("config: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },

    #[error("training failed: {0}")]
    Training(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid config #{index} [{config}]: {source}")]
    GridConfig {
        index: usize,
        config: String,
        #[source]
        source: Box<Error>,
    },

    /// Model artifact could not be decoded.
    #[error("model artifact: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the input data rather than by training.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::InvalidArgument(_)
            | Error::Config(_) => true,
            Error::Fold { source, .. } | Error::GridConfig { source, .. } => source.is_data_error(),
            Error::Diverged { .. } | Error::Training(_) => false,
        }
    }
}
