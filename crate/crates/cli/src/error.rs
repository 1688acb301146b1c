use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("data corruption: {0}")]
    Corruption(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 1 usage, 2 data corruption, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Corruption(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<mbcr_core::Error> for CliError {
    fn from(e: mbcr_core::Error) -> Self {
        use mbcr_core::Error::*;
        match e {
            Corruption(_) | SingularMatrix => CliError::Corruption(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
