use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::continuous::SignConvention;
use super::{anchor, check_version, CandidateKind, ErrorReport, GradeConfig, GradeError};
use crate::ac::{self, ComplexPower, Impedance, PfLabel, Role};
use crate::finding::{Finding, FindingCode, Severity};
use crate::multiperiod::{self, GridSpec, MultiPeriodError, MultiPeriodProblem, MultiPeriodSolution};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfClaim {
    pub value: f64,
    pub label: PfLabel,
}

/// What the candidate says about one period, matched by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodClaim {
    pub name: String,
    /// The candidate treated the load power factor as not given.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub load_pf_unknown: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_pf: Option<PfClaim>,
    /// In the problem's power unit (e.g. MVA).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apparent_power: Option<f64>,
    /// Load impedance, Ω.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impedance: Option<Impedance>,
    /// A power factor the candidate chose to aim for in this period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_pf: Option<PfClaim>,
    #[serde(default)]
    pub switched: bool,
    /// Claimed source power factor with compensation in place.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pf: Option<PfClaim>,
}

/// A reactance the candidate computed for a given supplied reactive power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactanceDerivation {
    /// Reactive power the element should supply, problem unit.
    pub supplied_q: f64,
    pub claimed_x: f64,
}

/// The candidate's split of a total reactance into fixed and switched parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelClaim {
    pub x_total: f64,
    pub x_fixed: f64,
    pub x_switched: f64,
}

/// Either reactances in Ω or supplied ratings in the problem unit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiPeriodDesign {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_fixed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_switched: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_cf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_cs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiPeriodCandidate {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default)]
    pub periods: Vec<PeriodClaim>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivations: Vec<ReactanceDerivation>,
    pub design: MultiPeriodDesign,
    #[serde(default)]
    pub capacitor_sign_convention: SignConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel: Option<ParallelClaim>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub markers: BTreeMap<String, String>,
}

impl MultiPeriodCandidate {
    /// Switch state per problem period; periods the candidate omits are off.
    pub fn states(&self, problem: &MultiPeriodProblem) -> Result<Vec<bool>, GradeError> {
        for claim in &self.periods {
            if !problem.periods.iter().any(|p| p.name == claim.name) {
                return Err(GradeError::Schema(format!("unknown period '{}'", claim.name)));
            }
        }
        Ok(problem
            .periods
            .iter()
            .map(|p| self.periods.iter().find(|c| c.name == p.name).is_some_and(|c| c.switched))
            .collect())
    }
}

pub fn grade_multiperiod(
    candidate: &MultiPeriodCandidate,
    problem: &MultiPeriodProblem,
    config: &GradeConfig,
) -> Result<ErrorReport, GradeError> {
    check_version(candidate.schema_version)?;
    problem.validate()?;
    let markers = &candidate.markers;
    let factor = problem.scale().factor();
    let v2 = problem.v_rms * problem.v_rms;
    let reactance_tol = Tolerance::relative(config.reactance_rel);
    let pf_tol = Tolerance::relative(config.pf_rel);
    let mut findings = Vec::new();
    let states = candidate.states(problem)?;

    // per-period load quantities
    for (k, claim) in candidate.periods.iter().enumerate() {
        let period = problem.periods.iter().find(|p| p.name == claim.name).expect("checked by states()");
        let base = format!("periods[{k}]");
        let pf = ac::power_factor(&period.load)?;
        let label = ac::label_pf(&pf, config.convention);
        let load_pf_wrong = claim.load_pf_unknown
            || claim.load_pf.is_some_and(|c| !pf_tol.close(c.value, pf.magnitude) || c.label != label);
        if load_pf_wrong {
            let location = format!("{base}.load_pf");
            let message = if claim.load_pf_unknown {
                format!("the load power factor of '{}' follows from its complex power", claim.name)
            } else {
                format!("load power factor of '{}'", claim.name)
            };
            findings.push(
                Finding::new(FindingCode::LoadPfWrong, Severity::Major, &location, message)
                    .values(pf_json(pf.magnitude, label), claim.load_pf.map_or(json!("unknown"), |c| pf_json(c.value, c.label)))
                    .tolerance(config.pf_rel)
                    .anchor(anchor(markers, &location)),
            );
        }
        if let Some(s) = claim.apparent_power {
            let actual = period.load.apparent();
            if !Tolerance::relative(config.power_rel).close(s, actual) {
                let location = format!("{base}.apparent_power");
                findings.push(
                    Finding::new(FindingCode::ApparentPowerWrong, Severity::Major, &location, "apparent power is |P + jQ|")
                        .values(actual, s)
                        .tolerance(config.power_rel)
                        .anchor(anchor(markers, &location)),
                );
            }
        }
        if let Some(z) = claim.impedance {
            let actual = ac::load_impedance(problem.v_rms, &period.load)?;
            let scale = actual.magnitude();
            let close = |a: f64, b: f64| (a - b).abs() <= config.reactance_rel * scale;
            if !(close(z.r, actual.r) && close(z.x, actual.x)) {
                let location = format!("{base}.impedance");
                findings.push(
                    Finding::new(FindingCode::ImpedanceFormulaWrong, Severity::Major, &location, "load impedance is |V|^2 / S*")
                        .values(json!({"r": actual.r, "x": actual.x}), json!({"r": z.r, "x": z.x}))
                        .tolerance(config.reactance_rel)
                        .anchor(anchor(markers, &location)),
                );
            }
        }
    }

    // reactance derivations
    for (k, d) in candidate.derivations.iter().enumerate() {
        if d.supplied_q == 0.0 {
            return Err(GradeError::Schema(format!("derivations[{k}] supplies no reactive power")));
        }
        let expected = -v2 / (d.supplied_q * factor);
        if reactance_tol.close(d.claimed_x, expected) {
            continue;
        }
        let location = format!("derivations[{k}].claimed_x");
        let (code, severity, message) = if reactance_tol.close(-d.claimed_x, expected) {
            (FindingCode::ReactanceSign, Severity::Minor, "a capacitor has negative reactance")
        } else {
            (FindingCode::ReactanceValueWrong, Severity::Major, "X = -|V|^2 / Q_supplied")
        };
        findings.push(
            Finding::new(code, severity, &location, message)
                .values(expected, d.claimed_x)
                .tolerance(config.reactance_rel)
                .anchor(anchor(markers, &location)),
        );
    }

    // design reactances and ratings
    let design = &candidate.design;
    let mut rating = |field: &str, x: Option<f64>, q: Option<f64>| -> Result<f64, GradeError> {
        match (x, q) {
            (Some(_), Some(_)) => Err(GradeError::Schema(format!("design gives both a reactance and a rating for {field}"))),
            (None, Some(q)) => Ok(q),
            (None, None) => Ok(0.0),
            (Some(mut x), None) => {
                if x > 0.0 {
                    let location = format!("design.x_{field}");
                    if candidate.capacitor_sign_convention == SignConvention::Signed {
                        findings.push(
                            Finding::new(
                                FindingCode::ReactanceSign,
                                Severity::Minor,
                                &location,
                                "a capacitor has negative reactance; normalized before evaluation",
                            )
                            .values(-x, x)
                            .anchor(anchor(markers, &location)),
                        );
                    }
                    x = -x;
                }
                if x == 0.0 || !x.is_finite() {
                    return Err(GradeError::Schema(format!("design.x_{field} must be a finite non-zero reactance")));
                }
                Ok(-v2 / (x * factor))
            }
        }
    };
    let q_cf = rating("fixed", design.x_fixed, design.q_cf)?;
    let q_cs = rating("switched", design.x_switched, design.q_cs)?;

    if let Some(p) = candidate.parallel {
        if let Some(f) = parallel_finding(&p, config, markers) {
            findings.push(f);
        }
    }

    let solution = MultiPeriodSolution::from_design(problem, q_cf, q_cs, states)?;
    let evaluation = multiperiod::evaluate_multiperiod(problem, &solution, config.convention)?;
    let oracle = oracle(problem)?;

    for (k, claim) in candidate.periods.iter().enumerate() {
        let Some(target) = claim.target_pf else { continue };
        if target.value < oracle.worst_pf && !pf_tol.close(target.value, oracle.worst_pf) {
            let location = format!("periods[{k}].target_pf");
            findings.push(
                Finding::new(
                    FindingCode::ArbitraryTarget,
                    Severity::Major,
                    &location,
                    "a chosen target power factor caps the design below what every period can reach",
                )
                .values(oracle.worst_pf, target.value)
                .tolerance(config.pf_rel)
                .anchor(anchor(markers, &location)),
            );
        }
    }

    let suboptimal = evaluation.worst_pf < oracle.worst_pf && !pf_tol.close(evaluation.worst_pf, oracle.worst_pf);
    let gap = if suboptimal { oracle.worst_pf - evaluation.worst_pf } else { 0.0 };
    if suboptimal {
        findings.push(
            Finding::new(
                FindingCode::Suboptimal,
                Severity::Fatal,
                "design",
                format!("the exhaustive optimum raises the worst power factor by {gap:.4}"),
            )
            .values(
                json!({"q_cf": oracle.q_cf, "q_cs": oracle.q_cs, "worst_pf": oracle.worst_pf}),
                json!({"q_cf": q_cf, "q_cs": q_cs, "worst_pf": evaluation.worst_pf}),
            )
            .tolerance(config.pf_rel)
            .anchor(anchor(markers, "design")),
        );
    }

    // claimed compensated power factors
    for (k, claim) in candidate.periods.iter().enumerate() {
        let Some(c) = claim.pf else { continue };
        let idx = problem.periods.iter().position(|p| p.name == claim.name).expect("checked by states()");
        let report = &evaluation.periods[idx];
        let load = &problem.periods[idx].load;
        let location = format!("periods[{k}].pf");
        let near_unity = report.net.q.abs() <= config.threshold_abs;
        if !pf_tol.close(c.value, report.pf) {
            let uncompensated = ac::power_factor(&ComplexPower { role: Role::Source, ..*load })?.magnitude;
            let fixed_present = q_cf > config.threshold_abs;
            let code = if fixed_present && pf_tol.close(c.value, uncompensated) && !report.switched {
                FindingCode::IgnoredFixedElement
            } else {
                FindingCode::ClaimValueWrong
            };
            let message = match code {
                FindingCode::IgnoredFixedElement => {
                    format!("the fixed capacitor stays connected in '{}' and moves its power factor", claim.name)
                }
                _ => format!("power factor of '{}' with the stated design", claim.name),
            };
            findings.push(
                Finding::new(code, Severity::Major, &location, message)
                    .values(pf_json(report.pf, report.label), pf_json(c.value, c.label))
                    .tolerance(config.pf_rel)
                    .anchor(anchor(markers, &location)),
            );
        } else if c.label != report.label && !(near_unity && c.label == PfLabel::Unity) {
            let location = format!("{location}.label");
            findings.push(
                Finding::new(FindingCode::LabelWrong, Severity::Major, &location, format!("label for '{}'", claim.name))
                    .values(report.label.to_string(), c.label.to_string())
                    .anchor(anchor(markers, &location)),
            );
        }
    }

    Ok(ErrorReport::new(CandidateKind::MultiPeriod, candidate.provenance.as_deref(), findings, Some(gap)))
}

fn pf_json(value: f64, label: PfLabel) -> serde_json::Value {
    json!({"value": value, "label": label})
}

/// Exhaustive optimum on the default grids, widened when the loads need it.
fn oracle(problem: &MultiPeriodProblem) -> Result<MultiPeriodSolution, GradeError> {
    let mut cf = GridSpec::DEFAULT_FIXED;
    let mut cs = GridSpec::DEFAULT_SWITCHED;
    match multiperiod::grid_search(problem, cf, cs) {
        Err(MultiPeriodError::GridTooSmall(_, largest)) => {
            cf.max = largest.ceil();
            cs.max = largest.ceil();
            Ok(multiperiod::grid_search(problem, cf, cs)?)
        }
        other => Ok(other?),
    }
}

fn parallel_finding(p: &ParallelClaim, config: &GradeConfig, markers: &BTreeMap<String, String>) -> Option<Finding> {
    let tol = Tolerance::relative(config.reactance_rel);
    let remainder = 1.0 / p.x_total - 1.0 / p.x_fixed;
    let expected = (remainder != 0.0).then(|| 1.0 / remainder);
    if expected.is_some_and(|e| tol.close(p.x_switched, e)) {
        return None;
    }
    let subtracted = tol.close(p.x_switched, p.x_total - p.x_fixed);
    let message = if subtracted {
        "parallel reactances combine through their reciprocals, not by subtraction"
    } else {
        "1/X_total must equal 1/X_fixed + 1/X_switched"
    };
    Some(
        Finding::new(FindingCode::ParallelReactanceArithmetic, Severity::Major, "parallel.x_switched", message)
            .values(expected.map_or(serde_json::Value::Null, |e| json!(e)), p.x_switched)
            .tolerance(config.reactance_rel)
            .anchor(anchor(markers, "parallel.x_switched")),
    )
}
