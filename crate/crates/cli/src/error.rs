use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unparseable or inconsistent scenario input.
    #[error("malformed scenario: {0}")]
    Malformed(String),

    #[error("numeric failure: {0}")]
    Numeric(#[from] growthlab::Error),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
