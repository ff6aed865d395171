//! Structural checks of a candidate formulation against a network.

use serde_json::json;
use thiserror::Error;

use super::document::{DocumentError, EquationKind, FormulationDocument, Symbol, Term};
use super::formulation::{assemble_formulation, Formulation, Residual};
use super::network::{BusType, Network};
use super::PowerFlowError;
use crate::finding::{Finding, FindingCode, Severity};
use crate::tolerance::Tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LintError {
    #[error("malformed candidate: {0}")]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Network(#[from] PowerFlowError),
}

/// Matching of candidate coefficients against branch data.
const COEFF_MATCH: Tolerance = Tolerance::new(1e-12, 1e-6);

pub fn lint_formulation(doc: &FormulationDocument, network: &Network) -> Result<Vec<Finding>, LintError> {
    let formulation = assemble_formulation(network)?;
    lint_against(doc, &formulation)
}

pub fn lint_against(doc: &FormulationDocument, f: &Formulation) -> Result<Vec<Finding>, LintError> {
    doc.check_version()?;
    let net = &f.network;
    let n = net.n();
    let anchor = |location: &str| crate::finding::marker_at(&doc.markers, location);
    let mut findings = Vec::new();

    let variables = doc
        .variables
        .iter()
        .map(|name| Symbol::parse_checked(name, n))
        .collect::<Result<Vec<_>, _>>()?;
    for eq in &doc.equations {
        for term in eq.terms.iter().flatten() {
            for factor in &term.factors {
                Symbol::parse_checked(factor, n)?;
            }
            if let Some(trig) = term.trig {
                for bus in [trig.i, trig.k] {
                    if bus == 0 || bus > n {
                        return Err(DocumentError::BusOutOfRange { symbol: format!("theta_{bus}"), bus, n }.into());
                    }
                }
            }
        }
        if let Some(bus) = eq.bus.filter(|&b| b == 0 || b > n) {
            return Err(DocumentError::BusOutOfRange { symbol: eq.label.clone(), bus, n }.into());
        }
    }

    for (k, symbol) in variables.iter().enumerate() {
        if let Some(value) = fixed_value(f, *symbol) {
            let location = format!("variables[{k}]");
            findings.push(
                Finding::new(
                    FindingCode::VarFixedQuantity,
                    Severity::Major,
                    &location,
                    format!("{symbol} is specified by the problem and should be substituted, not solved for"),
                )
                .values(value, "variable")
                .anchor(anchor(&location)),
            );
        }
    }

    let (n_eq, n_var) = (doc.equations.len(), doc.variables.len());
    if n_eq != n_var {
        findings.push(
            Finding::new(
                FindingCode::CountMismatch,
                Severity::Fatal,
                "equations",
                format!("{n_eq} equations for {n_var} variables"),
            )
            .values(json!([f.residuals.len(), f.n_vars()]), json!([n_eq, n_var]))
            .anchor(anchor("equations")),
        );
    }

    for (key, claimed) in &doc.bus_types {
        let id: usize = key
            .parse()
            .map_err(|_| DocumentError::UnknownSymbol(format!("bus_types.{key}")))?;
        let bus = net
            .bus(id)
            .ok_or_else(|| DocumentError::BusOutOfRange { symbol: format!("bus_types.{key}"), bus: id, n })?;
        if !type_acceptable(bus.kind, bus.participation.is_some(), *claimed) {
            let location = format!("bus_types.{key}");
            findings.push(
                Finding::new(
                    FindingCode::WrongBusType,
                    Severity::Major,
                    &location,
                    format!("bus {id} is {}, not {claimed}", bus.kind),
                )
                .values(bus.kind.to_string(), claimed.to_string())
                .anchor(anchor(&location)),
            );
        }
    }

    let has_active_residual = |bus: usize| {
        f.residuals.iter().any(|r| matches!(r, Residual::ActiveBalance { bus: b, .. } if *b == bus))
    };
    for (j, eq) in doc.equations.iter().enumerate() {
        let location = format!("equations[{j}]");
        let Some(bus_id) = eq.bus else { continue };
        let bus = net.bus(bus_id).expect("range checked above");
        let spurious = match eq.kind {
            EquationKind::ReactiveBalance => !bus.reactive_is_specified(),
            EquationKind::ActiveBalance => !has_active_residual(bus_id),
            _ => false,
        };
        if spurious {
            findings.push(
                Finding::new(
                    FindingCode::SpuriousEquation,
                    Severity::Major,
                    &location,
                    format!("{} injection at {} bus {bus_id} is free; its balance is not an equation", kind_word(eq.kind), bus.kind),
                )
                .values("absent", eq.label.clone())
                .anchor(anchor(&location)),
            );
        }
        if !matches!(eq.kind, EquationKind::ActiveBalance | EquationKind::ReactiveBalance) {
            continue;
        }
        let Some(terms) = &eq.terms else { continue };

        for neighbor in neighbors(net, bus_id) {
            if !terms.iter().any(|t| is_branch_term(t, f, bus_id, neighbor)) {
                findings.push(
                    Finding::new(
                        FindingCode::MissingBranchTerm,
                        Severity::Major,
                        &location,
                        format!("no V_{bus_id} V_{neighbor} flow term for the line between buses {bus_id} and {neighbor}"),
                    )
                    .values(format!("{bus_id}-{neighbor}"), "missing")
                    .anchor(anchor(&location)),
                );
            }
        }

        for (t, term) in terms.iter().enumerate() {
            let Some(trig) = term.trig else { continue };
            if let Some(found) = impedance_coefficient(net, f, trig.i, trig.k, term.coeff) {
                let term_location = format!("{location}.terms[{t}]");
                findings.push(
                    Finding::new(
                        FindingCode::ImpedanceForAdmittance,
                        Severity::Major,
                        &term_location,
                        format!("coefficient {} is the line {found}; flow terms use conductance and susceptance", term.coeff),
                    )
                    .values(
                        json!({"g": f.ybus.g[(trig.i - 1, trig.k - 1)], "b": f.ybus.b[(trig.i - 1, trig.k - 1)]}),
                        term.coeff,
                    )
                    .anchor(anchor(&term_location)),
                );
            }
        }

        let specified = match eq.kind {
            EquationKind::ActiveBalance if bus.active_is_specified() => bus.p_inj,
            EquationKind::ReactiveBalance if bus.reactive_is_specified() => bus.q_inj,
            _ => None,
        };
        if let Some(value) = specified.filter(|v| *v != 0.0) {
            if !COEFF_MATCH.close(eq.constant.abs(), value.abs()) {
                findings.push(
                    Finding::new(
                        FindingCode::MissingSpecifiedValue,
                        Severity::Major,
                        format!("{location}.constant"),
                        format!("the specified injection {value} at bus {bus_id} does not appear"),
                    )
                    .values(-value, eq.constant)
                    .anchor(anchor(&location)),
                );
            }
        }
    }

    for residual in &f.residuals {
        let kind = match residual {
            Residual::ActiveBalance { .. } => EquationKind::ActiveBalance,
            Residual::ReactiveBalance { .. } => EquationKind::ReactiveBalance,
        };
        if !doc.equations.iter().any(|e| e.kind == kind && e.bus == Some(residual.bus())) {
            findings.push(
                Finding::new(
                    FindingCode::MissingBalanceEquation,
                    Severity::Major,
                    "equations",
                    format!("no {} balance equation at bus {}", kind_word(kind), residual.bus()),
                )
                .values(residual.label(), "missing")
                .anchor(anchor("equations")),
            );
        }
    }

    if doc.claims.coefficients.as_deref() == Some("impedance") {
        findings.push(
            Finding::new(
                FindingCode::ImpedanceForAdmittance,
                Severity::Major,
                "claims.coefficients",
                "flow terms are weighted by Y-bus conductance and susceptance, not line impedance",
            )
            .values("admittance", "impedance")
            .anchor(anchor("claims.coefficients")),
        );
    }
    let lossy = net.branches.iter().any(|b| b.r != 0.0);
    for (k, item) in doc.claims.neglected.iter().enumerate() {
        if item == "line_losses" && lossy {
            let location = format!("claims.neglected[{k}]");
            findings.push(
                Finding::new(
                    FindingCode::UnsupportedSimplification,
                    Severity::Minor,
                    &location,
                    "the network has resistive lines, so the formulation carries losses",
                )
                .values("included", "neglected")
                .anchor(anchor(&location)),
            );
        }
    }

    Ok(findings)
}

/// Marker attached to `location` or its closest enclosing path.
fn kind_word(kind: EquationKind) -> &'static str {
    match kind {
        EquationKind::ReactiveBalance => "reactive",
        _ => "active",
    }
}

/// Specified value of a symbol the problem fixes, if any.
fn fixed_value(f: &Formulation, symbol: Symbol) -> Option<f64> {
    let bus = f.network.bus(symbol.bus()?)?;
    match symbol {
        Symbol::Magnitude(_) if bus.voltage_is_fixed() => bus.v_set,
        Symbol::Angle(i) if i == f.reference_bus() => Some(0.0),
        Symbol::Active(_) if bus.active_is_specified() => bus.p_inj,
        Symbol::Reactive(_) if bus.reactive_is_specified() => bus.q_inj,
        _ => None,
    }
}

fn type_acceptable(actual: BusType, weighted: bool, claimed: BusType) -> bool {
    actual == claimed || (actual == BusType::Reference && weighted && claimed == BusType::DistributedSlackMember)
}

fn neighbors(net: &Network, bus: usize) -> Vec<usize> {
    let mut out: Vec<usize> = net
        .branches
        .iter()
        .filter(|b| b.touches(bus))
        .map(|b| if b.from == bus { b.to } else { b.from })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// A flow term needs the angle difference and both magnitudes; a magnitude
/// the problem fixes may be folded into the coefficient.
fn is_branch_term(term: &Term, f: &Formulation, bus: usize, neighbor: usize) -> bool {
    let Some(trig) = term.trig else { return false };
    if !trig.spans(bus, neighbor) {
        return false;
    }
    let has = |i: usize| {
        let name = format!("V_{i}");
        term.factors.contains(&name) || f.network.bus(i).is_some_and(|b| b.voltage_is_fixed())
    };
    has(bus) && has(neighbor)
}

/// `Some("resistance")` etc. when `coeff` equals a series r or x of a line
/// between `i` and `k` without equalling the corresponding admittance entry.
fn impedance_coefficient(net: &Network, f: &Formulation, i: usize, k: usize, coeff: f64) -> Option<&'static str> {
    let (g, b) = (f.ybus.g[(i - 1, k - 1)], f.ybus.b[(i - 1, k - 1)]);
    let c = coeff.abs();
    if COEFF_MATCH.close(c, g.abs()) || COEFF_MATCH.close(c, b.abs()) {
        return None;
    }
    net.branches.iter().filter(|br| br.connects(i, k) || (i == k && br.touches(i))).find_map(|br| {
        if br.r != 0.0 && COEFF_MATCH.close(c, br.r.abs()) {
            Some("resistance")
        } else if br.x != 0.0 && COEFF_MATCH.close(c, br.x.abs()) {
            Some("reactance")
        } else {
            None
        }
    })
}
