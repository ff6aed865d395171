//! Machine-readable formulation documents.
//!
//! An equation is `constant + sum(coeff * prod(factors) * trig(theta_i - theta_k))`.
//! Factor names are `V_i`, `theta_i`, `P_i`, `Q_i` (bus injections) or `p`
//! (shared slack power).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formulation::{Formulation, Residual, Specified};
use super::network::BusType;
use super::newton::PowerFlowSolution;

pub const DOCUMENT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocumentError {
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("symbol '{symbol}' refers to bus {bus}, outside 1..={n}")]
    BusOutOfRange { symbol: String, bus: usize, n: usize },
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u32),
    #[error("equation '{0}' has neither terms nor text")]
    EmptyEquation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Magnitude(usize),
    Angle(usize),
    Active(usize),
    Reactive(usize),
    SlackPower,
}

impl Symbol {
    pub fn bus(&self) -> Option<usize> {
        match *self {
            Symbol::Magnitude(i) | Symbol::Angle(i) | Symbol::Active(i) | Symbol::Reactive(i) => Some(i),
            Symbol::SlackPower => None,
        }
    }

    pub fn parse_checked(name: &str, n: usize) -> Result<Self, DocumentError> {
        let symbol: Symbol = name.parse()?;
        match symbol.bus() {
            Some(bus) if bus == 0 || bus > n => {
                Err(DocumentError::BusOutOfRange { symbol: name.to_string(), bus, n })
            }
            _ => Ok(symbol),
        }
    }
}

impl FromStr for Symbol {
    type Err = DocumentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "p" {
            return Ok(Symbol::SlackPower);
        }
        let unknown = || DocumentError::UnknownSymbol(s.to_string());
        let (head, idx) = s.rsplit_once('_').ok_or_else(unknown)?;
        let bus: usize = idx.parse().map_err(|_| unknown())?;
        match head {
            "V" => Ok(Symbol::Magnitude(bus)),
            "theta" => Ok(Symbol::Angle(bus)),
            "P" => Ok(Symbol::Active(bus)),
            "Q" => Ok(Symbol::Reactive(bus)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Magnitude(i) => write!(f, "V_{i}"),
            Symbol::Angle(i) => write!(f, "theta_{i}"),
            Symbol::Active(i) => write!(f, "P_{i}"),
            Symbol::Reactive(i) => write!(f, "Q_{i}"),
            Symbol::SlackPower => f.write_str("p"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    ActiveBalance,
    ReactiveBalance,
    SlackSharing,
    VoltageFix,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigFn {
    Sin,
    Cos,
}

/// `fn(theta_i - theta_k)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trig {
    #[serde(rename = "fn")]
    pub func: TrigFn,
    pub i: usize,
    pub k: usize,
}

impl Trig {
    pub fn spans(&self, a: usize, b: usize) -> bool {
        (self.i == a && self.k == b) || (self.i == b && self.k == a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: f64,
    #[serde(default)]
    pub factors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<Trig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bus: Option<usize>,
    pub kind: EquationKind,
    #[serde(default)]
    pub constant: f64,
    /// `None` when the equation is only available as text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

/// Statements made alongside the equations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulationClaims {
    /// What the candidate says its line coefficients are: `admittance` or `impedance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<String>,
    /// Effects the candidate says it leaves out, e.g. `line_losses`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub neglected: Vec<String>,
}

impl FormulationClaims {
    fn is_empty(&self) -> bool {
        self.coefficients.is_none() && self.neglected.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulationDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub variables: Vec<String>,
    pub equations: Vec<EquationDoc>,
    /// Bus id (as a string key) to the type the candidate assigns it.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bus_types: BTreeMap<String, BusType>,
    #[serde(default, skip_serializing_if = "FormulationClaims::is_empty")]
    pub claims: FormulationClaims,
    /// Field path to the marker the candidate's author attached there.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub markers: BTreeMap<String, String>,
}

impl FormulationDocument {
    pub fn check_version(&self) -> Result<(), DocumentError> {
        if self.schema_version != DOCUMENT_SCHEMA_VERSION {
            return Err(DocumentError::SchemaVersion(self.schema_version));
        }
        Ok(())
    }
}

/// Symbol values at a solved operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    values: BTreeMap<Symbol, f64>,
}

impl SymbolTable {
    pub fn from_solution(solution: &PowerFlowSolution) -> Self {
        let mut values = BTreeMap::new();
        for bus in &solution.buses {
            values.insert(Symbol::Magnitude(bus.id), bus.v);
            values.insert(Symbol::Angle(bus.id), bus.theta);
            values.insert(Symbol::Active(bus.id), bus.p);
            values.insert(Symbol::Reactive(bus.id), bus.q);
        }
        if let Some(pos) = solution.variables.iter().position(|v| v == "p") {
            values.insert(Symbol::SlackPower, solution.x[pos]);
        }
        SymbolTable { values }
    }

    pub fn get(&self, s: Symbol) -> Option<f64> {
        self.values.get(&s).copied()
    }

    fn by_name(&self, name: &str) -> Result<f64, DocumentError> {
        let symbol: Symbol = name.parse()?;
        self.get(symbol).ok_or_else(|| DocumentError::UnknownSymbol(name.to_string()))
    }

    /// Value of a structured equation; `Ok(None)` for text-only equations.
    pub fn evaluate(&self, eq: &EquationDoc) -> Result<Option<f64>, DocumentError> {
        let Some(terms) = &eq.terms else {
            return if eq.text.is_some() { Ok(None) } else { Err(DocumentError::EmptyEquation(eq.label.clone())) };
        };
        let mut total = eq.constant;
        for term in terms {
            let mut value = term.coeff;
            for factor in &term.factors {
                value *= self.by_name(factor)?;
            }
            if let Some(trig) = term.trig {
                let angle = |i: usize| self.get(Symbol::Angle(i)).ok_or_else(|| DocumentError::UnknownSymbol(format!("theta_{i}")));
                let d = angle(trig.i)? - angle(trig.k)?;
                value *= match trig.func {
                    TrigFn::Sin => d.sin(),
                    TrigFn::Cos => d.cos(),
                };
            }
            total += value;
        }
        Ok(Some(total))
    }
}

/// The formulation's own residuals written out term by term, zero
/// coefficients omitted.
pub fn reference_document(f: &Formulation) -> FormulationDocument {
    let y = &f.ybus;
    let branch_terms = |i: usize, active: bool| {
        let mut terms = Vec::new();
        let vi = format!("V_{i}");
        let diag = if active { y.g[(i - 1, i - 1)] } else { -y.b[(i - 1, i - 1)] };
        if diag != 0.0 {
            terms.push(Term { coeff: diag, factors: vec![vi.clone(), vi.clone()], trig: None });
        }
        for k in 1..=y.n {
            if k == i {
                continue;
            }
            let (g, b) = (y.g[(i - 1, k - 1)], y.b[(i - 1, k - 1)]);
            let pairs = if active {
                [(g, TrigFn::Cos), (b, TrigFn::Sin)]
            } else {
                [(g, TrigFn::Sin), (-b, TrigFn::Cos)]
            };
            for (coeff, func) in pairs {
                if coeff != 0.0 {
                    terms.push(Term {
                        coeff,
                        factors: vec![vi.clone(), format!("V_{k}")],
                        trig: Some(Trig { func, i, k }),
                    });
                }
            }
        }
        terms
    };

    let equations = f
        .residuals
        .iter()
        .map(|r| {
            let bus = r.bus();
            let (kind, mut terms, constant) = match *r {
                Residual::ActiveBalance { specified, .. } => {
                    let mut terms = branch_terms(bus, true);
                    let constant = match specified {
                        Specified::Fixed(p) => -p,
                        Specified::Share(w) => {
                            terms.push(Term { coeff: -w, factors: vec!["p".into()], trig: None });
                            0.0
                        }
                    };
                    (EquationKind::ActiveBalance, terms, constant)
                }
                Residual::ReactiveBalance { specified, .. } => {
                    (EquationKind::ReactiveBalance, branch_terms(bus, false), -specified)
                }
            };
            terms.retain(|t| t.coeff != 0.0);
            EquationDoc { label: r.label(), bus: Some(bus), kind, constant: constant + 0.0, terms: Some(terms), text: None }
        })
        .collect();

    FormulationDocument {
        schema_version: DOCUMENT_SCHEMA_VERSION,
        provenance: None,
        variables: f.variable_names(),
        equations,
        bus_types: f.network.buses.iter().map(|b| (b.id.to_string(), b.kind)).collect(),
        claims: FormulationClaims::default(),
        markers: BTreeMap::new(),
    }
}
