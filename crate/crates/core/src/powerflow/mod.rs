//! AC power flow with voltage-controlled, pq and distributed-slack buses.
//!
//! Quantities are per unit; injections are positive into the network.

pub mod document;
pub mod formulation;
pub mod lint;
pub mod network;
pub mod newton;
pub mod ybus;

use thiserror::Error;

pub use document::{reference_document, FormulationDocument, SymbolTable};
pub use formulation::{assemble_formulation, Formulation, Residual, Specified, Variable};
pub use lint::{lint_formulation, LintError};
pub use network::{Branch, Bus, BusType, IssueCode, Network, NetworkIssue};
pub use newton::{solve_newton, NewtonSettings, PowerFlowSolution};
pub use ybus::{build_ybus, YBus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PowerFlowError {
    #[error("invalid network: {}", format_issues(.0))]
    InvalidNetwork(Vec<NetworkIssue>),
    #[error("branch {branch} ({from}-{to}) references a bus outside 1..={n}")]
    BusIndex { branch: usize, from: usize, to: usize, n: usize },
    #[error("branch {0} has zero or non-finite impedance, or loops to its own bus")]
    BadBranch(usize),
    #[error("expected {expected} variables, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("variable {0} is not finite")]
    NonFinite(usize),
    #[error("invalid solver settings: {0}")]
    Settings(String),
    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("no convergence after {} iterations, mismatch {:e}", .0.iterations, .0.mismatch)]
    NotConverged(Box<PowerFlowSolution>),
}

fn format_issues(issues: &[NetworkIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Assemble, solve from flat start.
pub fn solve_network(network: &Network, settings: NewtonSettings) -> Result<PowerFlowSolution, PowerFlowError> {
    let f = assemble_formulation(network)?;
    solve_newton(&f, &f.flat_start(), settings)
}
