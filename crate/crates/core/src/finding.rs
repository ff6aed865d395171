//! Taxonomy-coded findings shared by the formulation lint and the grader.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FindingCode {
    // continuous switched compensation
    ReactanceSign,
    ClaimValueWrong,
    UnityPointsAtExtremes,
    SuboptimalDesign,
    LabelConvention,
    LabelWrong,
    FalseOptimalityClaim,
    // multi-period compensation
    LoadPfWrong,
    ApparentPowerWrong,
    ImpedanceFormulaWrong,
    ReactanceValueWrong,
    ArbitraryTarget,
    Suboptimal,
    ParallelReactanceArithmetic,
    IgnoredFixedElement,
    // power-flow formulation
    VarFixedQuantity,
    CountMismatch,
    MissingBranchTerm,
    ImpedanceForAdmittance,
    WrongBusType,
    SpuriousEquation,
    MissingBalanceEquation,
    MissingSpecifiedValue,
    UnsupportedSimplification,
    ResidualNonzeroAtSolution,
    PartialGrade,
}

impl FindingCode {
    pub fn as_str(&self) -> &'static str {
        use FindingCode::*;
        match self {
            ReactanceSign => "REACTANCE_SIGN",
            ClaimValueWrong => "CLAIM_VALUE_WRONG",
            UnityPointsAtExtremes => "UNITY_POINTS_AT_EXTREMES",
            SuboptimalDesign => "SUBOPTIMAL_DESIGN",
            LabelConvention => "LABEL_CONVENTION",
            LabelWrong => "LABEL_WRONG",
            FalseOptimalityClaim => "FALSE_OPTIMALITY_CLAIM",
            LoadPfWrong => "LOAD_PF_WRONG",
            ApparentPowerWrong => "APPARENT_POWER_WRONG",
            ImpedanceFormulaWrong => "IMPEDANCE_FORMULA_WRONG",
            ReactanceValueWrong => "REACTANCE_VALUE_WRONG",
            ArbitraryTarget => "ARBITRARY_TARGET",
            Suboptimal => "SUBOPTIMAL",
            ParallelReactanceArithmetic => "PARALLEL_REACTANCE_ARITHMETIC",
            IgnoredFixedElement => "IGNORED_FIXED_ELEMENT",
            VarFixedQuantity => "VAR_FIXED_QUANTITY",
            CountMismatch => "COUNT_MISMATCH",
            MissingBranchTerm => "MISSING_BRANCH_TERM",
            ImpedanceForAdmittance => "IMPEDANCE_FOR_ADMITTANCE",
            WrongBusType => "WRONG_BUS_TYPE",
            SpuriousEquation => "SPURIOUS_EQUATION",
            MissingBalanceEquation => "MISSING_BALANCE_EQUATION",
            MissingSpecifiedValue => "MISSING_SPECIFIED_VALUE",
            UnsupportedSimplification => "UNSUPPORTED_SIMPLIFICATION",
            ResidualNonzeroAtSolution => "RESIDUAL_NONZERO_AT_SOLUTION",
            PartialGrade => "PARTIAL_GRADE",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Wrong final values and false claims are fatal, intermediate arithmetic
/// slips are major, sign-convention slips that normalize cleanly are minor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Fatal,
    Major,
    Minor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub code: FindingCode,
    /// Field path inside the candidate document, e.g. `periods[1].apparent_power`.
    pub location: String,
    pub expected: Value,
    pub actual: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub severity: Severity,
    pub message: String,
    /// Marker text the candidate attached to the offending statement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
}

impl Finding {
    pub fn new(code: FindingCode, severity: Severity, location: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            code,
            location: location.into(),
            expected: Value::Null,
            actual: Value::Null,
            tolerance: None,
            severity,
            message: message.into(),
            anchor: None,
        }
    }

    pub fn values(mut self, expected: impl Into<Value>, actual: impl Into<Value>) -> Self {
        self.expected = expected.into();
        self.actual = actual.into();
        self
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    pub fn anchor(mut self, anchor: Option<String>) -> Self {
        self.anchor = anchor;
        self
    }

    /// `CODE path expected actual`, values in compact JSON.
    pub fn text_line(&self) -> String {
        format!("{} {} {} {}", self.code, self.location, compact(&self.expected), compact(&self.actual))
    }
}

/// Marker attached to `location` or to its closest enclosing path.
pub fn marker_at(markers: &BTreeMap<String, String>, location: &str) -> Option<String> {
    let mut path = location;
    loop {
        if let Some(m) = markers.get(path) {
            return Some(m.clone());
        }
        path = &path[..path.rfind(['.', '['])?];
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) if !s.is_empty() && !s.contains(char::is_whitespace) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn code_serializes_like_display() {
        for code in [FindingCode::CountMismatch, FindingCode::ImpedanceForAdmittance, FindingCode::LabelWrong] {
            assert_eq!(serde_json::to_value(code).unwrap(), json!(code.as_str()));
        }
    }

    #[test]
    fn text_line_is_single_line() {
        let f = Finding::new(FindingCode::CountMismatch, Severity::Fatal, "equations", "7 equations for 11 variables")
            .values(json!([7, 7]), json!([7, 11]));
        assert_eq!(f.text_line(), "COUNT_MISMATCH equations [7,7] [7,11]");
        let f = Finding::new(FindingCode::LabelWrong, Severity::Major, "points[0].label", "x")
            .values("leading", "lagging");
        assert_eq!(f.text_line(), "LABEL_WRONG points[0].label leading lagging");
    }
}
