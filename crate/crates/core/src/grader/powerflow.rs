use serde_json::json;

use super::{anchor, CandidateKind, ErrorReport, GradeConfig, GradeError};
use crate::finding::{Finding, FindingCode, Severity};
use crate::powerflow::{self, assemble_formulation, FormulationDocument, NewtonSettings, Network, SymbolTable};

/// Structural lint, then every structured equation evaluated at the solved
/// operating point. Text-only equations get lint coverage only.
pub fn grade_powerflow(
    candidate: &FormulationDocument,
    network: &Network,
    config: &GradeConfig,
) -> Result<ErrorReport, GradeError> {
    let formulation = assemble_formulation(network)?;
    let mut findings = powerflow::lint::lint_against(candidate, &formulation)?;
    let solution = powerflow::solve_newton(&formulation, &formulation.flat_start(), NewtonSettings::default())?;
    let table = SymbolTable::from_solution(&solution);

    for (k, eq) in candidate.equations.iter().enumerate() {
        let location = format!("equations[{k}]");
        match table.evaluate(eq).map_err(powerflow::LintError::from)? {
            None => findings.push(
                Finding::new(
                    FindingCode::PartialGrade,
                    Severity::Minor,
                    &location,
                    format!("'{}' is free text; only its structure was checked", eq.label),
                )
                .anchor(anchor(&candidate.markers, &location)),
            ),
            Some(value) if value.abs() > config.residual_abs => findings.push(
                Finding::new(
                    FindingCode::ResidualNonzeroAtSolution,
                    Severity::Fatal,
                    &location,
                    format!("'{}' does not vanish at the solved operating point", eq.label),
                )
                .values(0.0, json!(value))
                .tolerance(config.residual_abs)
                .anchor(anchor(&candidate.markers, &location)),
            ),
            Some(_) => {}
        }
    }

    Ok(ErrorReport::new(CandidateKind::PowerflowFormulation, candidate.provenance.as_deref(), findings, None))
}
