use std::path::{Path, PathBuf};
use std::process::ExitCode;

use thiserror::Error;
use varcomp::grader::GradeError;
use varcomp::multiperiod::MultiPeriodError;
use varcomp::powerflow::{LintError, PowerFlowError};
use varcomp::switched::SwitchedError;

/// Stable process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Findings = 1,
    Input = 2,
    Solver = 3,
    NotConverged = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Input(_) => Exit::Input,
            CliError::Solver(_) | CliError::Write { .. } => Exit::Solver,
            CliError::NotConverged(_) => Exit::NotConverged,
        }
    }

    pub fn parse(path: &Path, message: impl ToString) -> Self {
        CliError::Parse { path: path.to_path_buf(), message: message.to_string() }
    }
}

impl From<SwitchedError> for CliError {
    fn from(e: SwitchedError) -> Self {
        match e {
            SwitchedError::InvalidProblem(_)
            | SwitchedError::InvalidGridStep(_)
            | SwitchedError::TooFewSamples(_)
            | SwitchedError::Inconsistent(_)
            | SwitchedError::MissingThreshold
            | SwitchedError::Ac(_) => CliError::Input(e.to_string()),
            SwitchedError::OutOfRange(_) => CliError::Solver(e.to_string()),
        }
    }
}

impl From<MultiPeriodError> for CliError {
    fn from(e: MultiPeriodError) -> Self {
        match e {
            MultiPeriodError::InvalidProblem(_) | MultiPeriodError::Ac(_) | MultiPeriodError::NegativeRating => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<PowerFlowError> for CliError {
    fn from(e: PowerFlowError) -> Self {
        match e {
            PowerFlowError::InvalidNetwork(ref issues) => {
                CliError::Input(issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
            }
            PowerFlowError::BusIndex { .. } | PowerFlowError::BadBranch(_) | PowerFlowError::Settings(_) => {
                CliError::Input(e.to_string())
            }
            PowerFlowError::NotConverged(_) => CliError::NotConverged(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<GradeError> for CliError {
    fn from(e: GradeError) -> Self {
        match e {
            GradeError::KindMismatch { .. } | GradeError::Schema(_) | GradeError::Ac(_) => {
                CliError::Input(e.to_string())
            }
            GradeError::Lint(LintError::Document(_)) => CliError::Input(e.to_string()),
            GradeError::Lint(LintError::Network(inner)) | GradeError::PowerFlow(inner) => inner.into(),
            GradeError::Switched(inner) => inner.into(),
            GradeError::MultiPeriod(inner) => inner.into(),
        }
    }
}
