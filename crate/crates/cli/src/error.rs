//! Failure classes and their exit codes.

use quench_core::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameters. Exit 1.
    Usage(String),
    /// A solver did not converge. Exit 2.
    Solver(String),
    /// A certificate check failed. Exit 3.
    Certificate(String),
    /// A simulation blew up. Exit 4.
    Abort(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Certificate(_) => 3,
            CliError::Abort(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Certificate(m) => write!(f, "certificate failure: {m}"),
            CliError::Abort(m) => write!(f, "simulation aborted: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Usage(e.to_string()),
            Error::Certificate { .. } => CliError::Certificate(e.to_string()),
            Error::SimulationAbort { .. } => CliError::Abort(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Solver(format!("i/o: {e}"))
    }
}
