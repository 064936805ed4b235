use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] maxcont_core::Error),
}

impl CliError {
    /// Process exit status for this error: 4 for points outside the range, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(maxcont_core::Error::OutsideRange { .. }) => 4,
            _ => 1,
        }
    }
}
