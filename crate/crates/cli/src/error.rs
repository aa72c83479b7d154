use lacsum_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(Error),
    #[error("{0}")]
    Io(String),
    #[error("replayed payload differs from the record")]
    Mismatch,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io(_) => 2,
            CliError::Mismatch => 3,
        }
    }
}

impl From<Error> for CliError {
    /// Malformed inputs are usage errors; overflow, budgets and capacity
    /// limits are computation errors.
    fn from(e: Error) -> Self {
        match e {
            Error::Empty
            | Error::NonPositive(_)
            | Error::Duplicate(_)
            | Error::Parse { .. }
            | Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e),
        }
    }
}
