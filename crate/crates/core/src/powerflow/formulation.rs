//! Variable and residual layout of the polar power-flow equations.
//!
//! Unknowns are the angles of every non-reference bus, the magnitudes of pq
//! buses and, when a slack group exists, one shared slack power `p` of which
//! member `i` supplies `w_i p` (weights normalized to sum to one). Residuals
//! are `calculated - specified` injections: active power at every bus whose
//! active power is not free, reactive power at pq buses.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::network::{BusType, Network};
use super::ybus::{build_ybus, YBus};
use super::PowerFlowError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bus", rename_all = "snake_case")]
pub enum Variable {
    Angle(usize),
    Magnitude(usize),
    SlackPower,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Angle(i) => write!(f, "theta_{i}"),
            Variable::Magnitude(i) => write!(f, "V_{i}"),
            Variable::SlackPower => f.write_str("p"),
        }
    }
}

/// What the calculated injection is balanced against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Specified {
    Fixed(f64),
    /// Normalized share of the slack power.
    Share(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Residual {
    ActiveBalance { bus: usize, specified: Specified },
    ReactiveBalance { bus: usize, specified: f64 },
}

impl Residual {
    pub fn bus(&self) -> usize {
        match *self {
            Residual::ActiveBalance { bus, .. } | Residual::ReactiveBalance { bus, .. } => bus,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Residual::ActiveBalance { bus, .. } => format!("P_balance_{bus}"),
            Residual::ReactiveBalance { bus, .. } => format!("Q_balance_{bus}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Formulation {
    pub network: Network,
    pub ybus: YBus,
    pub variables: Vec<Variable>,
    pub residuals: Vec<Residual>,
    /// Fixed magnitude per bus (index `id - 1`), `None` for pq buses.
    v_fixed: Vec<Option<f64>>,
    reference: usize,
}

/// Per-bus voltage state in bus-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct BusState {
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    pub slack_power: Option<f64>,
}

pub fn assemble_formulation(network: &Network) -> Result<Formulation, PowerFlowError> {
    let issues = network.issues();
    if !issues.is_empty() {
        return Err(PowerFlowError::InvalidNetwork(issues));
    }
    let ybus = build_ybus(&network.branches, network.n())?;
    Formulation::new(network, ybus)
}

impl Formulation {
    pub fn new(network: &Network, ybus: YBus) -> Result<Self, PowerFlowError> {
        let mut network = network.clone();
        network.buses.sort_by_key(|b| b.id);
        let reference = network.reference().map(|b| b.id).ok_or_else(|| {
            PowerFlowError::InvalidNetwork(network.issues())
        })?;

        let group = network.slack_group();
        let total_weight: f64 = group.iter().filter_map(|b| b.participation).sum();
        let distributed = !group.is_empty();

        let mut variables = Vec::new();
        variables.extend(network.buses.iter().filter(|b| b.id != reference).map(|b| Variable::Angle(b.id)));
        variables.extend(network.buses.iter().filter(|b| b.kind == BusType::Pq).map(|b| Variable::Magnitude(b.id)));
        if distributed {
            variables.push(Variable::SlackPower);
        }

        let mut residuals = Vec::new();
        for bus in &network.buses {
            let specified = match bus.kind {
                BusType::Pq | BusType::VoltageControlled => Specified::Fixed(bus.p_inj.unwrap_or(0.0)),
                BusType::DistributedSlackMember | BusType::Reference if distributed => {
                    Specified::Share(bus.participation.unwrap_or(0.0) / total_weight)
                }
                // classic slack: active power is free
                BusType::Reference => continue,
                BusType::DistributedSlackMember => unreachable!("members imply a slack group"),
            };
            residuals.push(Residual::ActiveBalance { bus: bus.id, specified });
        }
        for bus in network.buses.iter().filter(|b| b.kind == BusType::Pq) {
            residuals.push(Residual::ReactiveBalance { bus: bus.id, specified: bus.q_inj.unwrap_or(0.0) });
        }
        debug_assert_eq!(variables.len(), residuals.len());

        let v_fixed = network.buses.iter().map(|b| b.voltage_is_fixed().then(|| b.v_set.unwrap_or(1.0))).collect();
        Ok(Formulation { network, ybus, variables, residuals, v_fixed, reference })
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn reference_bus(&self) -> usize {
        self.reference
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables.iter().map(Variable::to_string).collect()
    }

    /// Sum of specified consumption outside the slack group.
    pub fn total_specified_load(&self) -> f64 {
        -self
            .residuals
            .iter()
            .filter_map(|r| match r {
                Residual::ActiveBalance { specified: Specified::Fixed(p), .. } => Some(*p),
                _ => None,
            })
            .sum::<f64>()
    }

    /// Flat start: `V = 1` at pq buses, zero angles, slack power equal to the load.
    pub fn flat_start(&self) -> Vec<f64> {
        self.variables
            .iter()
            .map(|v| match v {
                Variable::Angle(_) => 0.0,
                Variable::Magnitude(_) => 1.0,
                Variable::SlackPower => self.total_specified_load(),
            })
            .collect()
    }

    pub fn state(&self, x: &[f64]) -> Result<BusState, PowerFlowError> {
        if x.len() != self.n_vars() {
            return Err(PowerFlowError::Dimension { expected: self.n_vars(), actual: x.len() });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(PowerFlowError::NonFinite(i));
        }
        let n = self.ybus.n;
        let mut v: Vec<f64> = self.v_fixed.iter().map(|f| f.unwrap_or(1.0)).collect();
        let mut theta = vec![0.0; n];
        let mut slack_power = None;
        for (var, &value) in self.variables.iter().zip(x) {
            match *var {
                Variable::Angle(i) => theta[i - 1] = value,
                Variable::Magnitude(i) => v[i - 1] = value,
                Variable::SlackPower => slack_power = Some(value),
            }
        }
        Ok(BusState { v, theta, slack_power })
    }

    /// `f(x)`; zero at a power-flow solution.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>, PowerFlowError> {
        let state = self.state(x)?;
        Ok(self.residual_of(&state))
    }

    pub(crate) fn residual_of(&self, state: &BusState) -> Vec<f64> {
        self.residuals
            .iter()
            .map(|r| match *r {
                Residual::ActiveBalance { bus, specified } => {
                    let target = match specified {
                        Specified::Fixed(p) => p,
                        Specified::Share(w) => w * state.slack_power.unwrap_or(0.0),
                    };
                    injection(&self.ybus, &state.v, &state.theta, bus - 1).0 - target
                }
                Residual::ReactiveBalance { bus, specified } => {
                    injection(&self.ybus, &state.v, &state.theta, bus - 1).1 - specified
                }
            })
            .collect()
    }
}

/// `(P_i, Q_i)` from the polar injection equations.
pub fn injection(y: &YBus, v: &[f64], theta: &[f64], i: usize) -> (f64, f64) {
    let (mut p, mut q) = (0.0, 0.0);
    for k in 0..y.n {
        let (g, b) = (y.g[(i, k)], y.b[(i, k)]);
        if g == 0.0 && b == 0.0 {
            continue;
        }
        let (s, c) = (theta[i] - theta[k]).sin_cos();
        p += v[k] * (g * c + b * s);
        q += v[k] * (g * s - b * c);
    }
    (v[i] * p, v[i] * q)
}
