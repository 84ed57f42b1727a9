use std::fmt;

use haa_core::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

/// A command failure carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    pub fn compute(message: impl Into<String>) -> Self {
        Self { code: EXIT_COMPUTE, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Parse { .. } => Self::input(message),
            Error::InvalidInput(_) | Error::InvalidAnsatz(_) | Error::TooManyQubits { .. } => Self::usage(message),
            _ => Self::compute(message),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::compute(format!("i/o error: {e}"))
    }
}
