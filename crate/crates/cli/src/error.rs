use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ncrelay_core::Error),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 4 for truncated
    /// simulations, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use ncrelay_core::Error as Core;
        match self {
            CliError::Usage(_) | CliError::Core(Core::InvalidParameter { .. }) => 2,
            CliError::Core(Core::Truncated { .. }) => 4,
            CliError::Core(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
