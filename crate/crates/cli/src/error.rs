use std::path::PathBuf;

use golden_core::Error;

/// A spec file problem, located as precisely as the parser allows.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}: {message}", location(file, *line, *column))]
pub struct SpecError {
    pub file: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

fn location(file: &str, line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!("{file}:{l}:{c}"),
        (Some(l), None) => format!("{file}:{l}"),
        _ => file.to_string(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0} universal identity check(s) violated")]
    Violations(usize),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const SOLVER: u8 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Spec(_) => exit::PARSE,
            CliError::Write { .. } | CliError::Violations(_) => exit::VALIDATION,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::InvalidChart(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidRank(_)
                | Error::UnknownEntry(_) => exit::PARSE,
                Error::SolverResidualTooLarge { .. } | Error::NonUniqueSolution { .. } | Error::NotDifferentiable => {
                    exit::SOLVER
                }
                _ => exit::VALIDATION,
            },
        }
    }
}
