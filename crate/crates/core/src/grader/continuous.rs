use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{anchor, check_version, CandidateKind, ErrorReport, GradeConfig, GradeError};
use crate::ac::PfLabel;
use crate::finding::{Finding, FindingCode, Severity};
use crate::switched::{self, CompensationProblem, DesignSolution};
use crate::tolerance::Tolerance;

/// How the candidate writes capacitor reactances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Capacitors carry negative reactance.
    #[default]
    Signed,
    /// Capacitor reactances are written as magnitudes.
    Magnitude,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateDesign {
    /// Fixed element reactance, Ω.
    #[serde(default)]
    pub x_l: Option<f64>,
    /// Switched capacitor reactance, Ω.
    #[serde(default)]
    pub x_c: Option<f64>,
    #[serde(default)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousClaims {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unity_points: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_abs_qs: Option<f64>,
    /// Smallest and largest `|Q_s|` over the demand range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_qs_range: Option<(f64, f64)>,
    /// Smallest and largest signed `Q_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qs_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_pf: Option<f64>,
    /// The candidate asserts no design does better.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointClaim {
    pub q_d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<PfLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousCandidate {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub design: CandidateDesign,
    #[serde(default)]
    pub capacitor_sign_convention: SignConvention,
    #[serde(default)]
    pub claims: ContinuousClaims,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointClaim>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub markers: BTreeMap<String, String>,
}

impl ContinuousCandidate {
    /// Reactances with capacitors made negative, plus the findings raised
    /// while doing so.
    pub fn normalized_design(&self) -> (CandidateDesign, Vec<Finding>) {
        let mut design = self.design;
        let mut findings = Vec::new();
        if let Some(x) = design.x_c.filter(|x| *x > 0.0) {
            if self.capacitor_sign_convention == SignConvention::Signed {
                findings.push(
                    Finding::new(
                        FindingCode::ReactanceSign,
                        Severity::Minor,
                        "design.x_c",
                        "a capacitor has negative reactance; normalized before evaluation",
                    )
                    .values(-x, x)
                    .anchor(anchor(&self.markers, "design.x_c")),
                );
            }
            design.x_c = Some(-x);
        }
        (design, findings)
    }

    /// Evaluable design after sign normalization.
    pub fn to_solution(&self, problem: &CompensationProblem) -> Result<DesignSolution, GradeError> {
        let (d, _) = self.normalized_design();
        Ok(DesignSolution::from_reactances(problem, d.x_l, d.x_c, d.threshold)?)
    }
}

pub fn grade_continuous(
    candidate: &ContinuousCandidate,
    problem: &CompensationProblem,
    config: &GradeConfig,
) -> Result<ErrorReport, GradeError> {
    check_version(candidate.schema_version)?;
    problem.validate()?;
    let markers = &candidate.markers;
    let (_, mut findings) = candidate.normalized_design();
    let design = candidate.to_solution(problem)?;
    let report = switched::evaluate(&design, problem)?;
    let oracle = switched::design_minimax(problem)?;

    let power = Tolerance::new(config.threshold_abs, config.power_rel);
    let pf_tol = Tolerance::relative(config.pf_rel);
    let claims = &candidate.claims;

    let mut claim_pair = |field: &str, claimed: Option<(f64, f64)>, actual: (f64, f64)| {
        if let Some(c) = claimed {
            if !(power.close(c.0, actual.0) && power.close(c.1, actual.1)) {
                let location = format!("claims.{field}");
                findings.push(
                    Finding::new(
                        FindingCode::ClaimValueWrong,
                        Severity::Major,
                        &location,
                        format!("claimed {field} does not follow from the design"),
                    )
                    .values(json!([actual.0, actual.1]), json!([c.0, c.1]))
                    .tolerance(config.power_rel)
                    .anchor(anchor(markers, &location)),
                );
            }
        }
    };
    let design_unity = ordered(design.unity_points);
    claim_pair("unity_points", claims.unity_points.map(ordered), design_unity);
    claim_pair("abs_qs_range", claims.abs_qs_range, report.abs_qs_range);
    claim_pair("qs_range", claims.qs_range, report.qs_range);

    if let Some(c) = claims.worst_abs_qs {
        if !power.close(c, report.worst_abs_qs) {
            findings.push(claim_scalar(markers, "worst_abs_qs", report.worst_abs_qs, c, config.power_rel));
        }
    }
    if let Some(c) = claims.worst_pf {
        if !pf_tol.close(c, report.worst_pf) {
            findings.push(claim_scalar(markers, "worst_pf", report.worst_pf, c, config.pf_rel));
        }
    }

    let suboptimal = report.worst_pf < oracle.worst_pf && !pf_tol.close(report.worst_pf, oracle.worst_pf);
    let gap = if suboptimal { oracle.worst_pf - report.worst_pf } else { 0.0 };
    if suboptimal {
        let at_extremes = {
            let t = Tolerance::absolute(config.threshold_abs);
            t.close(design_unity.0, problem.q_min) && t.close(design_unity.1, problem.q_max)
        };
        let location = if claims.unity_points.is_some() { "claims.unity_points" } else { "design" };
        let (code, message) = if at_extremes {
            (
                FindingCode::UnityPointsAtExtremes,
                "unity points placed at the ends of the demand range; moving them inward lowers the worst |Q_s|",
            )
        } else {
            (FindingCode::SuboptimalDesign, "a min-max design reaches a higher worst power factor")
        };
        findings.push(
            Finding::new(code, Severity::Fatal, location, message)
                .values(
                    json!({"unity_points": [oracle.unity_points.0, oracle.unity_points.1], "worst_pf": oracle.worst_pf}),
                    json!({"unity_points": [design_unity.0, design_unity.1], "worst_pf": report.worst_pf}),
                )
                .tolerance(config.pf_rel)
                .anchor(anchor(markers, location)),
        );
    }

    findings.extend(check_points(candidate, problem, &design, config)?);

    if suboptimal && claims.optimal == Some(true) {
        findings.push(
            Finding::new(
                FindingCode::FalseOptimalityClaim,
                Severity::Fatal,
                "claims.optimal",
                format!("claimed optimal, but the min-max design improves the worst power factor by {gap:.4}"),
            )
            .values(false, true)
            .anchor(anchor(markers, "claims.optimal")),
        );
    }

    Ok(ErrorReport::new(CandidateKind::ContinuousCompensation, candidate.provenance.as_deref(), findings, Some(gap)))
}

fn ordered((a, b): (f64, f64)) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn claim_scalar(markers: &BTreeMap<String, String>, field: &str, actual: f64, claimed: f64, rel: f64) -> Finding {
    let location = format!("claims.{field}");
    Finding::new(FindingCode::ClaimValueWrong, Severity::Major, &location, format!("claimed {field} does not follow from the design"))
        .values(actual, claimed)
        .tolerance(rel)
        .anchor(anchor(markers, &location))
}

fn check_points(
    candidate: &ContinuousCandidate,
    problem: &CompensationProblem,
    design: &DesignSolution,
    config: &GradeConfig,
) -> Result<Vec<Finding>, GradeError> {
    let markers = &candidate.markers;
    let power = Tolerance::new(config.threshold_abs, config.power_rel);
    let pf_tol = Tolerance::relative(config.pf_rel);
    let mut findings = Vec::new();
    // (location, expected, claimed) for labels that are not near unity
    let mut labels: Vec<(String, PfLabel, PfLabel)> = Vec::new();

    for (k, claim) in candidate.points.iter().enumerate() {
        let base = format!("points[{k}]");
        let point = switched::profile_point(design, problem, claim.q_d, config.convention)?;
        if let Some(q_s) = claim.q_s {
            if !power.close(q_s, point.q_s) {
                let location = format!("{base}.q_s");
                findings.push(
                    Finding::new(FindingCode::ClaimValueWrong, Severity::Major, &location, format!("Q_s at Q_d = {}", claim.q_d))
                        .values(point.q_s, q_s)
                        .anchor(anchor(markers, &location)),
                );
            }
        }
        if let Some(pf) = claim.pf {
            if !pf_tol.close(pf, point.pf) {
                let location = format!("{base}.pf");
                findings.push(
                    Finding::new(FindingCode::ClaimValueWrong, Severity::Major, &location, format!("pf at Q_d = {}", claim.q_d))
                        .values(point.pf, pf)
                        .tolerance(config.pf_rel)
                        .anchor(anchor(markers, &location)),
                );
            }
        }
        let Some(label) = claim.label else { continue };
        let near_unity = point.q_s.abs() <= config.threshold_abs;
        let expected = if near_unity { PfLabel::Unity } else { point.label };
        if label == expected || (near_unity && label != PfLabel::Unity && label == point.label) {
            continue;
        }
        labels.push((format!("{base}.label"), expected, label));
    }

    let all_swapped = !labels.is_empty()
        && labels.iter().all(|(_, e, c)| *e != PfLabel::Unity && *c == e.swapped())
        && candidate.points.iter().filter(|p| p.label.is_some_and(|l| l != PfLabel::Unity)).count() == labels.len();
    if all_swapped {
        findings.push(
            Finding::new(
                FindingCode::LabelConvention,
                Severity::Minor,
                "points",
                format!("every leading/lagging label is swapped relative to the {} convention", config.convention.as_str()),
            )
            .values(config.convention.as_str(), "swapped")
            .anchor(anchor(markers, "points")),
        );
    } else {
        for (location, expected, claimed) in labels {
            findings.push(
                Finding::new(FindingCode::LabelWrong, Severity::Major, &location, "power factor label")
                    .values(expected.to_string(), claimed.to_string())
                    .anchor(anchor(markers, &location)),
            );
        }
    }
    Ok(findings)
}
