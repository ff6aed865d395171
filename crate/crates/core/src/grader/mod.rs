//! Grading of candidate solution documents against the oracles.
//!
//! Every check emits a [`Finding`] with a taxonomy code and the field path
//! it concerns. Reports are deterministic: findings follow the document
//! order of the checks and contain no timestamps or hash-ordered data.

mod continuous;
mod multiperiod;
mod powerflow;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ac::{AcError, LabelConvention};
pub(crate) use crate::finding::marker_at as anchor;
use crate::finding::{Finding, Severity};
use crate::multiperiod::MultiPeriodError;
use crate::powerflow::{FormulationDocument, LintError, PowerFlowError};
use crate::switched::SwitchedError;

pub use continuous::{
    grade_continuous, CandidateDesign, ContinuousCandidate, ContinuousClaims, PointClaim, SignConvention,
};
pub use multiperiod::{
    grade_multiperiod, MultiPeriodCandidate, MultiPeriodDesign, ParallelClaim, PeriodClaim, PfClaim,
    ReactanceDerivation,
};
pub use powerflow::grade_powerflow;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const CANDIDATE_SCHEMA_VERSION: u32 = 1;

pub const SEVERITY_NOTE: &str = "severity classes (fatal: wrong final values or false claims; major: wrong \
intermediate quantities; minor: convention slips that normalize cleanly) are a local convention, not a published rubric";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GradeError {
    #[error("candidate kind {candidate} does not match problem kind {problem}")]
    KindMismatch { candidate: String, problem: String },
    #[error("candidate schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Switched(#[from] SwitchedError),
    #[error(transparent)]
    MultiPeriod(#[from] MultiPeriodError),
    #[error(transparent)]
    Lint(#[from] LintError),
    #[error(transparent)]
    PowerFlow(#[from] PowerFlowError),
    #[error(transparent)]
    Ac(#[from] AcError),
}

/// Numeric tolerances and the lead/lag convention used for label checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradeConfig {
    pub reactance_rel: f64,
    pub pf_rel: f64,
    /// VAr (or MVAr for multi-period problems), also the band within which
    /// a reactive power counts as zero for labels.
    pub threshold_abs: f64,
    pub power_rel: f64,
    pub residual_abs: f64,
    pub convention: LabelConvention,
}

impl Default for GradeConfig {
    fn default() -> Self {
        GradeConfig {
            reactance_rel: 0.005,
            pf_rel: 0.005,
            threshold_abs: 0.1,
            power_rel: 0.005,
            residual_abs: 1e-6,
            convention: LabelConvention::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateKind {
    ContinuousCompensation,
    MultiPeriod,
    PowerflowFormulation,
}

impl CandidateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateKind::ContinuousCompensation => "continuous-compensation",
            CandidateKind::MultiPeriod => "multi-period",
            CandidateKind::PowerflowFormulation => "powerflow-formulation",
        }
    }
}

/// A candidate file: the kind tag plus the kind's document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Candidate {
    ContinuousCompensation(ContinuousCandidate),
    MultiPeriod(MultiPeriodCandidate),
    PowerflowFormulation(FormulationDocument),
}

impl Candidate {
    pub fn kind(&self) -> CandidateKind {
        match self {
            Candidate::ContinuousCompensation(_) => CandidateKind::ContinuousCompensation,
            Candidate::MultiPeriod(_) => CandidateKind::MultiPeriod,
            Candidate::PowerflowFormulation(_) => CandidateKind::PowerflowFormulation,
        }
    }

    pub fn provenance(&self) -> Option<&str> {
        match self {
            Candidate::ContinuousCompensation(c) => c.provenance.as_deref(),
            Candidate::MultiPeriod(c) => c.provenance.as_deref(),
            Candidate::PowerflowFormulation(c) => c.provenance.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub n_fatal: usize,
    pub n_major: usize,
    pub n_minor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub kind: CandidateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub findings: Vec<Finding>,
    pub summary: Summary,
    /// Oracle worst power factor minus the candidate's, never negative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimality_gap: Option<f64>,
    pub note: String,
}

impl ErrorReport {
    pub fn new(kind: CandidateKind, provenance: Option<&str>, findings: Vec<Finding>, optimality_gap: Option<f64>) -> Self {
        let mut summary = Summary::default();
        for f in &findings {
            match f.severity {
                Severity::Fatal => summary.n_fatal += 1,
                Severity::Major => summary.n_major += 1,
                Severity::Minor => summary.n_minor += 1,
            }
        }
        ErrorReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind,
            provenance: provenance.map(str::to_string),
            findings,
            summary,
            optimality_gap,
            note: SEVERITY_NOTE.to_string(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }

    /// One finding per line, then a summary line and the severity note.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            out.push_str(&f.text_line());
            out.push('\n');
        }
        let s = &self.summary;
        let _ = write!(out, "# {} findings: {} fatal, {} major, {} minor", self.findings.len(), s.n_fatal, s.n_major, s.n_minor);
        if let Some(gap) = self.optimality_gap {
            let _ = write!(out, "; optimality gap {gap}");
        }
        let _ = writeln!(out, "\n# {}", self.note);
        out
    }
}

pub(crate) fn check_version(version: u32) -> Result<(), GradeError> {
    if version != CANDIDATE_SCHEMA_VERSION {
        return Err(GradeError::Schema(format!("unsupported schema_version {version}")));
    }
    Ok(())
}
