//! Newton iteration with a central-difference Jacobian.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::formulation::{injection, BusState, Formulation, Residual, Specified};
use super::ybus::series_admittance;
use super::PowerFlowError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSettings {
    /// Convergence threshold on the infinity norm of the residual.
    pub tol: f64,
    /// Largest number of Newton updates.
    pub max_iter: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings { tol: 1e-10, max_iter: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusResult {
    pub id: usize,
    pub v: f64,
    /// Radians.
    pub theta: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFlow {
    pub from: usize,
    pub to: usize,
    pub p_from: f64,
    pub q_from: f64,
    pub p_to: f64,
    pub q_to: f64,
    pub current: f64,
    /// `|I|^2 r`
    pub p_loss: f64,
    /// `|I|^2 x`
    pub q_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFlowSolution {
    pub converged: bool,
    /// Convergence checks performed, so a flat start that already solves
    /// the equations reports one.
    pub iterations: usize,
    pub mismatch: f64,
    pub variables: Vec<String>,
    pub x: Vec<f64>,
    pub buses: Vec<BusResult>,
    pub branches: Vec<BranchFlow>,
    pub losses: Losses,
}

impl PowerFlowSolution {
    pub fn bus(&self, id: usize) -> Option<&BusResult> {
        self.buses.iter().find(|b| b.id == id)
    }

    pub fn total_injection(&self) -> (f64, f64) {
        self.buses.iter().fold((0.0, 0.0), |(p, q), b| (p + b.p, q + b.q))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Column `j` uses step `1e-6 * max(1, |x_j|)`.
pub fn fd_jacobian(f: &Formulation, x: &[f64]) -> Result<DMatrix<f64>, PowerFlowError> {
    let n = x.len();
    let mut jac = DMatrix::zeros(f.residuals.len(), n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let plus = f.residual(&probe)?;
        probe[j] = x[j] - h;
        let minus = f.residual(&probe)?;
        probe[j] = x[j];
        for (i, (a, b)) in plus.iter().zip(&minus).enumerate() {
            jac[(i, j)] = (a - b) / (2.0 * h);
        }
    }
    Ok(jac)
}

pub fn solve_newton(
    f: &Formulation,
    x0: &[f64],
    settings: NewtonSettings,
) -> Result<PowerFlowSolution, PowerFlowError> {
    if settings.tol.is_nan() || settings.tol <= 0.0 || settings.max_iter == 0 {
        return Err(PowerFlowError::Settings(format!(
            "tol must be positive and max_iter at least 1 (got {}, {})",
            settings.tol, settings.max_iter
        )));
    }
    let mut x = x0.to_vec();
    let mut checks = 0;
    loop {
        let r = f.residual(&x)?;
        checks += 1;
        let mismatch = inf_norm(&r);
        if mismatch < settings.tol {
            return report(f, &x, checks, mismatch, true);
        }
        if checks > settings.max_iter {
            let snapshot = report(f, &x, checks, mismatch, false)?;
            return Err(PowerFlowError::NotConverged(Box::new(snapshot)));
        }
        let jac = fd_jacobian(f, &x)?;
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
        let step = solve_dense(jac, rhs).ok_or(PowerFlowError::SingularJacobian { iteration: checks })?;
        for (xi, dx) in x.iter_mut().zip(step.iter()) {
            *xi += dx;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(PowerFlowError::SingularJacobian { iteration: checks });
        }
    }
}

/// Partial-pivot LU; `None` when a pivot vanishes relative to the matrix scale.
fn solve_dense(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let scale = a.amax();
    if scale == 0.0 {
        return None;
    }
    let lu = a.lu();
    let min_pivot = lu.u().diagonal().amin();
    if min_pivot <= 1e-13 * scale {
        return None;
    }
    lu.solve(&b)
}

fn report(
    f: &Formulation,
    x: &[f64],
    iterations: usize,
    mismatch: f64,
    converged: bool,
) -> Result<PowerFlowSolution, PowerFlowError> {
    let state = f.state(x)?;
    let buses = bus_results(f, &state);
    let branches = branch_flows(f, &state);
    let losses = branches.iter().fold(Losses { p: 0.0, q: 0.0 }, |acc, b| Losses {
        p: acc.p + b.p_loss,
        q: acc.q + b.q_loss,
    });
    Ok(PowerFlowSolution {
        converged,
        iterations,
        mismatch,
        variables: f.variable_names(),
        x: x.to_vec(),
        buses,
        branches,
        losses,
    })
}

/// Balanced quantities report their scheduled value (so slack shares are
/// exact); free ones are recovered from the injection equations.
fn bus_results(f: &Formulation, state: &BusState) -> Vec<BusResult> {
    f.network
        .buses
        .iter()
        .map(|bus| {
            let i = bus.id - 1;
            let (mut p, mut q) = injection(&f.ybus, &state.v, &state.theta, i);
            for r in f.residuals.iter().filter(|r| r.bus() == bus.id) {
                match *r {
                    Residual::ActiveBalance { specified: Specified::Fixed(v), .. } => p = v,
                    Residual::ActiveBalance { specified: Specified::Share(w), .. } => {
                        p = w * state.slack_power.unwrap_or(0.0)
                    }
                    Residual::ReactiveBalance { specified, .. } => q = specified,
                }
            }
            BusResult { id: bus.id, v: state.v[i], theta: state.theta[i], p, q }
        })
        .collect()
}

fn branch_flows(f: &Formulation, state: &BusState) -> Vec<BranchFlow> {
    let phasor = |i: usize| Complex64::from_polar(state.v[i], state.theta[i]);
    f.network
        .branches
        .iter()
        .map(|br| {
            let (vf, vt) = (phasor(br.from - 1), phasor(br.to - 1));
            let current = (vf - vt) * series_admittance(br);
            let s_from = vf * current.conj();
            let s_to = vt * (-current).conj();
            let i2 = current.norm_sqr();
            BranchFlow {
                from: br.from,
                to: br.to,
                p_from: s_from.re,
                q_from: s_from.im,
                p_to: s_to.re,
                q_to: s_to.im,
                current: i2.sqrt(),
                p_loss: i2 * br.r,
                q_loss: i2 * br.x,
            }
        })
        .collect()
}
