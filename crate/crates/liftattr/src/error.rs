use std::fmt;

/// Errors raised by the engine and the file/CLI layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("oracle refuses {vars} variables (cap is {cap})")]
    OracleCap { vars: usize, cap: usize },
    #[error("deadline exceeded")]
    Timeout,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit code associated with an error class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Input = 2,
    Timeout = 3,
    Invariant = 4,
}

impl Error {
    pub fn input(msg: impl fmt::Display) -> Self {
        Error::Input(msg.to_string())
    }

    pub fn contract(msg: impl fmt::Display) -> Self {
        Error::Contract(msg.to_string())
    }

    pub fn invariant(msg: impl fmt::Display) -> Self {
        Error::Invariant(msg.to_string())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::Input(_)
            | Error::Parse { .. }
            | Error::Contract(_)
            | Error::OracleCap { .. }
            | Error::Io(_) => ExitCode::Input,
            Error::Timeout => ExitCode::Timeout,
            Error::Invariant(_) => ExitCode::Invariant,
        }
    }
}
