use std::fmt;

use clusterbench::Error;

/// Process exit codes.
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_DOMAIN: u8 = 4;

/// An error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            error: error.into(),
        }
    }

    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INPUT,
            error: error.into(),
        }
    }

    pub fn domain(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::Config { .. } | Error::UnknownKeys(_) | Error::ConfigParse(_) => EXIT_CONFIG,
            Error::UndefinedIndex(_)
            | Error::DegenerateGeometry
            | Error::InvalidIndex(_)
            | Error::Capacity(_) => EXIT_DOMAIN,
            Error::EmptyInput(_)
            | Error::Consistency(_)
            | Error::MissingEnergy(_)
            | Error::MissingPosition(_)
            | Error::Overlap(..) => EXIT_INPUT,
            Error::AtTick { .. } => EXIT_RUNTIME,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, Failure>;
