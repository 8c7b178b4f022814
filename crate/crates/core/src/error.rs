use thiserror::Error;

/// Unified error type for the engine, synthesis, analysis and I/O layers.
///
/// The CLI maps variants to exit codes: `Config` is a usage problem (2),
/// `Format` and `Io` are input/output problems (3), `Numeric` means a
/// non-finite value was detected in the data path (4).
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("format: {0}")]
    Format(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Format(_) | Error::Io(_) => 3,
            Error::Numeric(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
