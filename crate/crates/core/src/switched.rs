//! Fixed element + switched capacitor compensation for a continuously varying
//! reactive demand.
//!
//! The source sees `Q_s = Q_d + Q_L` with the switch open and
//! `Q_s = Q_d + Q_L + Q_C` with it closed. The switch is open for
//! `Q_d <= threshold` and closed above. Everything here works on the ratings
//! `Q_L`, `Q_C` at nominal voltage; reactances are derived at the edges.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ac::{self, AcError, ComplexPower, LabelConvention, PfLabel, ShuntElement, UnitScale};
use crate::grid;
use crate::tolerance::Tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwitchedError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("design has a switched capacitor but no switching threshold")]
    MissingThreshold,
    #[error("grid step must be positive, got {0}")]
    InvalidGridStep(f64),
    #[error("a profile needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("demand {0} VAr outside the problem range")]
    OutOfRange(f64),
    #[error("solution inconsistent with problem: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Ac(#[from] AcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompensationProblem {
    /// Source voltage, volts RMS.
    pub v_rms: f64,
    /// Hz.
    pub frequency: f64,
    /// Constant active demand, W.
    pub p_d: f64,
    /// Reactive demand range, VAr.
    pub q_min: f64,
    pub q_max: f64,
}

impl CompensationProblem {
    pub fn validate(&self) -> Result<(), SwitchedError> {
        let fields = [self.v_rms, self.frequency, self.p_d, self.q_min, self.q_max];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(SwitchedError::InvalidProblem("non-finite field".into()));
        }
        if self.v_rms <= 0.0 {
            return Err(SwitchedError::InvalidProblem(format!("v_rms must be positive, got {}", self.v_rms)));
        }
        if self.frequency <= 0.0 {
            return Err(SwitchedError::InvalidProblem(format!(
                "frequency must be positive, got {}",
                self.frequency
            )));
        }
        if self.p_d <= 0.0 {
            return Err(SwitchedError::InvalidProblem(format!("p_d must be positive, got {}", self.p_d)));
        }
        if self.q_min > self.q_max {
            return Err(SwitchedError::InvalidProblem(format!(
                "q_min {} exceeds q_max {}",
                self.q_min, self.q_max
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn pf_for(&self, abs_qs: f64) -> f64 {
        self.p_d / self.p_d.hypot(abs_qs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchState {
    Open,
    Closed,
}

impl SwitchState {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchState::Open => "open",
            SwitchState::Closed => "closed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    /// Fixed element reactance, Ω. Positive for an inductor.
    pub x_l: Option<f64>,
    /// Switched capacitor reactance, Ω (negative).
    pub x_c: Option<f64>,
    /// Fixed element rating at nominal voltage, VAr consumed.
    pub q_l: f64,
    /// Switched element rating at nominal voltage, VAr consumed.
    pub q_c: f64,
    /// Demand above which the switch closes.
    pub threshold: Option<f64>,
    /// Demands at which the open and closed lines cross zero.
    pub unity_points: (f64, f64),
    pub worst_abs_qs: f64,
    pub worst_pf: f64,
}

impl DesignSolution {
    /// Builds a design from ratings and fills in its worst-case metrics.
    pub fn from_ratings(
        problem: &CompensationProblem,
        q_l: f64,
        q_c: f64,
        threshold: Option<f64>,
    ) -> Result<Self, SwitchedError> {
        problem.validate()?;
        let fixed = ShuntElement::from_rating(problem.v_rms, q_l)?;
        let switched = ShuntElement::from_rating(problem.v_rms, q_c)?;
        let q_l = if fixed.is_present() { q_l } else { 0.0 };
        let q_c = if switched.is_present() { q_c } else { 0.0 };
        let mut design = DesignSolution {
            x_l: fixed.reactance(),
            x_c: switched.reactance(),
            q_l,
            q_c,
            threshold,
            unity_points: (-q_l, -(q_l + q_c)),
            worst_abs_qs: 0.0,
            worst_pf: 1.0,
        };
        let worst = worst_abs_qs(problem, design.q_l, design.q_c, design.threshold)?;
        design.worst_abs_qs = worst;
        design.worst_pf = problem.pf_for(worst);
        Ok(design)
    }

    /// Builds a design from signed reactances.
    pub fn from_reactances(
        problem: &CompensationProblem,
        x_l: Option<f64>,
        x_c: Option<f64>,
        threshold: Option<f64>,
    ) -> Result<Self, SwitchedError> {
        problem.validate()?;
        let q_l = ac::shunt_reactive_power(problem.v_rms, &ShuntElement::from_optional(x_l)?)?;
        let q_c = ac::shunt_reactive_power(problem.v_rms, &ShuntElement::from_optional(x_c)?)?;
        let mut design = Self::from_ratings(problem, q_l, q_c, threshold)?;
        // keep the caller's reactances verbatim
        design.x_l = x_l;
        design.x_c = x_c;
        Ok(design)
    }

    fn check_against(&self, problem: &CompensationProblem) -> Result<(), SwitchedError> {
        let tol = Tolerance::new(1e-9, 1e-6);
        let v2 = problem.v_rms * problem.v_rms;
        for (name, x, q) in [("x_l", self.x_l, self.q_l), ("x_c", self.x_c, self.q_c)] {
            match x {
                Some(x) if !tol.close(v2 / x, q) => {
                    return Err(SwitchedError::Inconsistent(format!(
                        "{name} = {x} gives {} VAr at {} V, rating says {q}",
                        v2 / x,
                        problem.v_rms
                    )));
                }
                None if q.abs() >= ShuntElement::ABSENT_BELOW_VAR => {
                    return Err(SwitchedError::Inconsistent(format!("{name} absent but rating is {q}")));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn state_at(&self, q_d: f64) -> SwitchState {
        match self.threshold {
            Some(t) if q_d > t => SwitchState::Closed,
            _ => SwitchState::Open,
        }
    }

    pub fn qs_at(&self, q_d: f64) -> (SwitchState, f64) {
        let state = self.state_at(q_d);
        (state, q_d + self.q_l + state_factor(state) * self.q_c)
    }
}

fn state_factor(state: SwitchState) -> f64 {
    match state {
        SwitchState::Open => 0.0,
        SwitchState::Closed => 1.0,
    }
}

/// Analytic min-max design: unity points at the first and third quarter of
/// the demand range, switch threshold at the midpoint, worst `|Q_s| = W / 4`.
pub fn design_minimax(problem: &CompensationProblem) -> Result<DesignSolution, SwitchedError> {
    problem.validate()?;
    let width = problem.width();
    if width == 0.0 {
        let mut design = DesignSolution::from_ratings(problem, -problem.q_min, 0.0, Some(problem.q_min))?;
        design.unity_points = (problem.q_min, problem.q_min);
        return Ok(design);
    }
    let q1 = problem.q_min + width / 4.0;
    let q2 = problem.q_min + 3.0 * width / 4.0;
    let q_l = -q1;
    let q_c = -(q2 + q_l);
    let threshold = (q1 + q2) / 2.0;
    let mut design = DesignSolution::from_ratings(problem, q_l, q_c, Some(threshold))?;
    design.unity_points = (q1, q2);
    Ok(design)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentExtremes {
    pub state: SwitchState,
    pub from: f64,
    pub to: f64,
    pub qs_from: f64,
    pub qs_to: f64,
    pub max_abs_qs: f64,
    pub min_abs_qs: f64,
    pub zero_crossing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub worst_abs_qs: f64,
    pub worst_pf: f64,
    /// Demands where the worst `|Q_s|` is attained (or approached, at the
    /// closed side of the threshold).
    pub argmax_qd: Vec<f64>,
    /// Signed range of `Q_s` over the demand range.
    pub qs_range: (f64, f64),
    /// Range of `|Q_s|`.
    pub abs_qs_range: (f64, f64),
    pub segments: Vec<SegmentExtremes>,
}

fn segments_of(
    problem: &CompensationProblem,
    q_c: f64,
    threshold: Option<f64>,
) -> Result<Vec<(SwitchState, f64, f64)>, SwitchedError> {
    if q_c != 0.0 && threshold.is_none() {
        return Err(SwitchedError::MissingThreshold);
    }
    let (lo, hi) = (problem.q_min, problem.q_max);
    let Some(t) = threshold else {
        return Ok(vec![(SwitchState::Open, lo, hi)]);
    };
    if !t.is_finite() {
        return Err(SwitchedError::Inconsistent(format!("threshold {t} is not finite")));
    }
    let mut out = Vec::with_capacity(2);
    if t >= lo {
        out.push((SwitchState::Open, lo, t.min(hi)));
    }
    if t < hi {
        out.push((SwitchState::Closed, t.max(lo), hi));
    }
    Ok(out)
}

/// Worst `|Q_s|` over the demand range without allocating.
pub fn worst_abs_qs(
    problem: &CompensationProblem,
    q_l: f64,
    q_c: f64,
    threshold: Option<f64>,
) -> Result<f64, SwitchedError> {
    if q_c != 0.0 && threshold.is_none() {
        return Err(SwitchedError::MissingThreshold);
    }
    Ok(worst_unchecked(problem.q_min, problem.q_max, q_l, q_c, threshold.unwrap_or(f64::INFINITY)))
}

#[inline]
fn worst_unchecked(lo: f64, hi: f64, q_l: f64, q_c: f64, t: f64) -> f64 {
    let mut worst = 0.0f64;
    if t >= lo {
        let end = if t < hi { t } else { hi };
        worst = worst.max((lo + q_l).abs()).max((end + q_l).abs());
    }
    if t < hi {
        let start = if t > lo { t } else { lo };
        worst = worst.max((start + q_l + q_c).abs()).max((hi + q_l + q_c).abs());
    }
    worst
}

/// Exact piecewise-linear analysis of a design over the demand range.
pub fn evaluate(candidate: &DesignSolution, problem: &CompensationProblem) -> Result<EvaluationReport, SwitchedError> {
    problem.validate()?;
    let segments = segments_of(problem, candidate.q_c, candidate.threshold)?;
    let mut extremes = Vec::with_capacity(segments.len());
    for (state, from, to) in segments {
        let offset = candidate.q_l + state_factor(state) * candidate.q_c;
        let (qs_from, qs_to) = (from + offset, to + offset);
        let zero = -offset;
        let zero_crossing = (zero >= from && zero <= to).then_some(zero);
        let min_abs_qs = if zero_crossing.is_some() { 0.0 } else { qs_from.abs().min(qs_to.abs()) };
        extremes.push(SegmentExtremes {
            state,
            from,
            to,
            qs_from,
            qs_to,
            max_abs_qs: qs_from.abs().max(qs_to.abs()),
            min_abs_qs,
            zero_crossing,
        });
    }

    let worst = extremes.iter().map(|s| s.max_abs_qs).fold(0.0, f64::max);
    let tol = Tolerance::IDENTITY;
    let mut argmax: Vec<f64> = Vec::new();
    for s in &extremes {
        for (q_d, q_s) in [(s.from, s.qs_from), (s.to, s.qs_to)] {
            if tol.close(q_s.abs(), worst) && !argmax.iter().any(|&a| tol.close(a, q_d)) {
                argmax.push(q_d);
            }
        }
    }
    argmax.sort_by(f64::total_cmp);

    let qs_min = extremes.iter().map(|s| s.qs_from.min(s.qs_to)).fold(f64::INFINITY, f64::min);
    let qs_max = extremes.iter().map(|s| s.qs_from.max(s.qs_to)).fold(f64::NEG_INFINITY, f64::max);
    let abs_min = extremes.iter().map(|s| s.min_abs_qs).fold(f64::INFINITY, f64::min);

    Ok(EvaluationReport {
        worst_abs_qs: worst,
        worst_pf: problem.pf_for(worst),
        argmax_qd: argmax,
        qs_range: (qs_min, qs_max),
        abs_qs_range: (abs_min, worst),
        segments: extremes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub q_d: f64,
    pub switch_state: SwitchState,
    pub q_s: f64,
    pub pf: f64,
    pub label: PfLabel,
}

/// Source-side view of a single demand value.
pub fn profile_point(
    solution: &DesignSolution,
    problem: &CompensationProblem,
    q_d: f64,
    convention: LabelConvention,
) -> Result<ProfilePoint, SwitchedError> {
    if !(q_d >= problem.q_min && q_d <= problem.q_max) {
        return Err(SwitchedError::OutOfRange(q_d));
    }
    let (state, q_s) = solution.qs_at(q_d);
    let pf = ac::power_factor(&ComplexPower::source(problem.p_d, q_s, UnitScale::Base))?;
    Ok(ProfilePoint { q_d, switch_state: state, q_s, pf: pf.magnitude, label: ac::label_pf(&pf, convention) })
}

/// `n_samples` uniformly spaced demands including both range ends.
pub fn qs_profile(
    solution: &DesignSolution,
    problem: &CompensationProblem,
    n_samples: usize,
    convention: LabelConvention,
) -> Result<Vec<ProfilePoint>, SwitchedError> {
    problem.validate()?;
    if n_samples < 2 {
        return Err(SwitchedError::TooFewSamples(n_samples));
    }
    solution.check_against(problem)?;
    if solution.q_c != 0.0 && solution.threshold.is_none() {
        return Err(SwitchedError::MissingThreshold);
    }
    let last = n_samples - 1;
    (0..n_samples)
        .map(|i| {
            let q_d = if i == last {
                problem.q_max
            } else {
                problem.q_min + problem.width() * i as f64 / last as f64
            };
            profile_point(solution, problem, q_d, convention)
        })
        .collect()
}

pub const PROFILE_CSV_HEADER: &str = "q_d,switch_state,q_s,pf,label";

pub fn profile_to_csv(points: &[ProfilePoint]) -> String {
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(PROFILE_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{}", p.q_d, p.switch_state.as_str(), p.q_s, p.pf, p.label);
    }
    out
}

/// Exhaustive grid search over `(Q_L, Q_C, threshold)`; independent of
/// [`design_minimax`].
///
/// Ties in the worst case go to the smallest `(|Q_C|, |Q_L|, threshold)`.
/// Evaluation is parallel but the reduction uses that total order, so the
/// result equals a sequential scan.
pub fn brute_force_design(problem: &CompensationProblem, grid_step: f64) -> Result<DesignSolution, SwitchedError> {
    problem.validate()?;
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(SwitchedError::InvalidGridStep(grid_step));
    }
    let w = problem.width();
    let (lo, hi) = (problem.q_min, problem.q_max);
    let q_l_axis = grid::aligned((-2.0 * w).min(-hi - w), (2.0 * w).max(-lo + w), grid_step);
    let q_c_axis = grid::aligned(-2.0 * w, 0.0, grid_step);
    let t_axis = grid::aligned(lo, hi, grid_step);

    #[derive(Clone, Copy)]
    struct Best {
        worst: f64,
        q_c: f64,
        q_l: f64,
        t: f64,
    }
    fn better(a: Best, b: Best) -> Best {
        let key = |x: &Best| (x.worst, x.q_c.abs(), x.q_l.abs(), x.t);
        let (ka, kb) = (key(&a), key(&b));
        let ord = ka
            .0
            .total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.total_cmp(&kb.3));
        if ord.is_le() {
            a
        } else {
            b
        }
    }

    let best = q_c_axis
        .par_iter()
        .map(|&q_c| {
            let mut best = Best { worst: f64::INFINITY, q_c, q_l: 0.0, t: 0.0 };
            for &q_l in &q_l_axis {
                // every threshold on the axis leaves q_min open, and q_max
                // either open (t = q_max) or closed
                let floor = (lo + q_l).abs().max((hi + q_l + q_c).abs().min((hi + q_l).abs()));
                if floor > best.worst {
                    continue;
                }
                for &t in &t_axis {
                    // the open segment only grows with t
                    if (t + q_l).abs() > best.worst {
                        break;
                    }
                    let worst = worst_unchecked(lo, hi, q_l, q_c, t);
                    best = better(best, Best { worst, q_c, q_l, t });
                }
            }
            best
        })
        .reduce_with(better)
        .expect("grid axes are never empty");

    DesignSolution::from_ratings(problem, best.q_l, best.q_c, Some(best.t))
}
