//! Fixed + switched capacitor design across discrete load periods.
//!
//! Ratings are positive supplied MVAr (or VAr, following the loads' scale).
//! Period `i` sees a source reactive power of `Q_i - q_cf - s_i q_cs` and the
//! design objective is the worst `|Q| / P` ratio across periods.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ac::{self, AcError, ComplexPower, LabelConvention, LoadSpec, PfLabel, UnitScale};
use crate::grid;

/// Largest number of periods the exhaustive state scan accepts.
pub const MAX_PERIODS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiPeriodError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("empty grid: max {max}, step {step}")]
    EmptyGrid { max: f64, step: f64 },
    #[error("grid maxima ({0}) do not cover the largest period demand ({1})")]
    GridTooSmall(f64, f64),
    #[error("expected {expected} switch states, got {actual}")]
    StateCount { expected: usize, actual: usize },
    #[error("ratings must be non-negative")]
    NegativeRating,
    #[error("optimal band needs exactly one switched period, got {0}")]
    NotSingleSwitched(usize),
    #[error("target ratio {target} unreachable: {reason}")]
    TargetUnreachable { target: f64, reason: String },
    #[error(transparent)]
    Ac(#[from] AcError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadPeriod {
    pub name: String,
    pub load: ComplexPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodSpec {
    pub name: String,
    pub load: LoadSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPeriodProblem {
    /// Volts RMS.
    pub v_rms: f64,
    pub frequency: f64,
    pub periods: Vec<LoadPeriod>,
}

impl MultiPeriodProblem {
    pub fn from_specs(
        v_rms: f64,
        frequency: f64,
        specs: &[PeriodSpec],
        scale: UnitScale,
    ) -> Result<Self, MultiPeriodError> {
        let periods = specs
            .iter()
            .map(|s| {
                Ok(LoadPeriod { name: s.name.clone(), load: ac::complex_power_from_spec(&s.load, scale)? })
            })
            .collect::<Result<Vec<_>, MultiPeriodError>>()?;
        let problem = MultiPeriodProblem { v_rms, frequency, periods };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<(), MultiPeriodError> {
        let invalid = |m: String| Err(MultiPeriodError::InvalidProblem(m));
        if !(self.v_rms.is_finite() && self.v_rms > 0.0) {
            return invalid(format!("v_rms must be positive, got {}", self.v_rms));
        }
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return invalid(format!("frequency must be positive, got {}", self.frequency));
        }
        if self.periods.is_empty() {
            return invalid("at least one period is required".into());
        }
        if self.periods.len() > MAX_PERIODS {
            return invalid(format!("at most {MAX_PERIODS} periods are supported"));
        }
        let scale = self.periods[0].load.scale;
        for (i, period) in self.periods.iter().enumerate() {
            if !(period.load.p > 0.0 && period.load.p.is_finite() && period.load.q.is_finite()) {
                return invalid(format!("period '{}' needs positive finite active power", period.name));
            }
            if period.load.scale != scale {
                return invalid(format!("period '{}' uses a different unit scale", period.name));
            }
            if self.periods[..i].iter().any(|p| p.name == period.name) {
                return invalid(format!("duplicate period name '{}'", period.name));
            }
        }
        Ok(())
    }

    pub fn scale(&self) -> UnitScale {
        self.periods.first().map(|p| p.load.scale).unwrap_or_default()
    }

    /// Period indices sorted by name; the scan order for tie-breaking.
    fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.periods.len()).collect();
        order.sort_by(|&a, &b| self.periods[a].name.cmp(&self.periods[b].name));
        order
    }

    fn check_states(&self, states: &[bool]) -> Result<(), MultiPeriodError> {
        if states.len() != self.periods.len() {
            return Err(MultiPeriodError::StateCount { expected: self.periods.len(), actual: states.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub const DEFAULT_FIXED: GridSpec = GridSpec { max: 5.0, step: 0.01 };
    pub const DEFAULT_SWITCHED: GridSpec = GridSpec { max: 30.0, step: 0.1 };

    fn points(&self) -> Result<Vec<f64>, MultiPeriodError> {
        if !(self.step > 0.0 && self.step.is_finite() && self.max >= 0.0 && self.max.is_finite()) {
            return Err(MultiPeriodError::EmptyGrid { max: self.max, step: self.step });
        }
        Ok(grid::ascending(self.max, self.step))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPeriodSolution {
    /// Fixed capacitor rating, supplied.
    pub q_cf: f64,
    /// Switched capacitor rating, supplied.
    pub q_cs: f64,
    /// Switch state per period, in problem order.
    pub states: Vec<bool>,
    pub worst_ratio: f64,
    pub worst_pf: f64,
    /// Fixed capacitor reactance, Ω (negative), absent for a zero rating.
    pub x_cf: Option<f64>,
    pub x_cs: Option<f64>,
    /// Range of switched ratings that keep the worst ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<(f64, f64)>,
    /// Switched rating that nulls the switched period's reactive power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_cs_nulling: Option<f64>,
}

impl MultiPeriodSolution {
    pub fn from_design(
        problem: &MultiPeriodProblem,
        q_cf: f64,
        q_cs: f64,
        states: Vec<bool>,
    ) -> Result<Self, MultiPeriodError> {
        let ratio = worst_ratio(problem, q_cf, q_cs, &states)?;
        let factor = problem.scale().factor();
        let reactance = |q: f64| {
            (q.abs() >= ac::ShuntElement::ABSENT_BELOW_VAR / factor)
                .then(|| -problem.v_rms * problem.v_rms / (q * factor))
        };
        Ok(MultiPeriodSolution {
            q_cf,
            q_cs,
            worst_pf: 1.0 / (1.0 + ratio * ratio).sqrt(),
            worst_ratio: ratio,
            x_cf: reactance(q_cf),
            x_cs: reactance(q_cs),
            states,
            band: None,
            q_cs_nulling: None,
        })
    }

    /// Fills `band` and `q_cs_nulling` when exactly one period is switched.
    pub fn with_band(mut self, problem: &MultiPeriodProblem) -> Result<Self, MultiPeriodError> {
        let band = optimal_band(problem, self.q_cf, &self.states, self.worst_ratio)?;
        let switched = self.states.iter().position(|&s| s).expect("band implies one switched period");
        self.q_cs_nulling = Some((problem.periods[switched].load.q - self.q_cf).max(0.0));
        self.band = Some(band);
        Ok(self)
    }
}

/// `max_i |Q_i - q_cf - s_i q_cs| / P_i`
pub fn worst_ratio(
    problem: &MultiPeriodProblem,
    q_cf: f64,
    q_cs: f64,
    states: &[bool],
) -> Result<f64, MultiPeriodError> {
    problem.check_states(states)?;
    if q_cf < 0.0 || q_cs < 0.0 {
        return Err(MultiPeriodError::NegativeRating);
    }
    Ok(problem
        .periods
        .iter()
        .zip(states)
        .map(|(period, &s)| period_ratio(period, q_cf, q_cs, s))
        .fold(0.0, f64::max))
}

#[inline]
fn period_ratio(period: &LoadPeriod, q_cf: f64, q_cs: f64, switched: bool) -> f64 {
    let s = if switched { 1.0 } else { 0.0 };
    (period.load.q - q_cf - s * q_cs).abs() / period.load.p
}

/// Exhaustive scan of switch states and rating grids.
///
/// States are scanned as a binary counter over periods sorted by name (the
/// first name is the most significant bit), then `q_cf` ascending, then
/// `q_cs` ascending; only a strictly smaller worst ratio replaces the
/// incumbent, so the first minimizer in that order wins.
pub fn grid_search(
    problem: &MultiPeriodProblem,
    cf_grid: GridSpec,
    cs_grid: GridSpec,
) -> Result<MultiPeriodSolution, MultiPeriodError> {
    problem.validate()?;
    let cf_points = cf_grid.points()?;
    let cs_points = cs_grid.points()?;
    let largest = problem.periods.iter().map(|p| p.load.q).fold(0.0, f64::max);
    if cf_grid.max + cs_grid.max < largest {
        return Err(MultiPeriodError::GridTooSmall(cf_grid.max + cs_grid.max, largest));
    }

    let order = problem.canonical_order();
    let n = order.len();
    let mut states = vec![false; n];
    let mut best: Option<(f64, Vec<bool>, f64, f64)> = None;
    for mask in 0u32..(1u32 << n) {
        for (rank, &idx) in order.iter().enumerate() {
            states[idx] = (mask >> (n - 1 - rank)) & 1 == 1;
        }
        for &x in &cf_points {
            for &y in &cs_points {
                let r = problem
                    .periods
                    .iter()
                    .zip(&states)
                    .map(|(period, &s)| period_ratio(period, x, y, s))
                    .fold(0.0, f64::max);
                if best.as_ref().is_none_or(|b| r < b.0) {
                    best = Some((r, states.clone(), x, y));
                }
            }
        }
    }
    let (_, states, q_cf, q_cs) = best.expect("grids are non-empty");
    MultiPeriodSolution::from_design(problem, q_cf, q_cs, states)
}

/// Closed interval of switched ratings keeping the single switched period's
/// ratio at or below `target_ratio`, clipped to non-negative ratings.
///
/// Only the switched period constrains the band; unswitched periods may
/// exceed `target_ratio` (a zero target yields the nulling rating).
pub fn optimal_band(
    problem: &MultiPeriodProblem,
    q_cf: f64,
    states: &[bool],
    target_ratio: f64,
) -> Result<(f64, f64), MultiPeriodError> {
    problem.check_states(states)?;
    let switched: Vec<usize> = states.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect();
    if switched.len() != 1 {
        return Err(MultiPeriodError::NotSingleSwitched(switched.len()));
    }
    let active = &problem.periods[switched[0]].load;
    let center = active.q - q_cf;
    let half = target_ratio * active.p;
    let (lo, hi) = (center - half, center + half);
    if hi < 0.0 {
        return Err(MultiPeriodError::TargetUnreachable {
            target: target_ratio,
            reason: format!("band [{lo}, {hi}] has no non-negative rating"),
        });
    }
    Ok((lo.max(0.0), hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub name: String,
    pub switched: bool,
    /// Power supplied by the source.
    pub net: ComplexPower,
    pub ratio: f64,
    pub pf: f64,
    pub label: PfLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPeriodEvaluation {
    pub periods: Vec<PeriodReport>,
    pub worst_ratio: f64,
    pub worst_pf: f64,
}

pub fn evaluate_multiperiod(
    problem: &MultiPeriodProblem,
    solution: &MultiPeriodSolution,
    convention: LabelConvention,
) -> Result<MultiPeriodEvaluation, MultiPeriodError> {
    problem.check_states(&solution.states)?;
    let mut periods = Vec::with_capacity(problem.periods.len());
    for (period, &switched) in problem.periods.iter().zip(&solution.states) {
        let s = if switched { 1.0 } else { 0.0 };
        let net = ComplexPower::source(
            period.load.p,
            period.load.q - solution.q_cf - s * solution.q_cs,
            period.load.scale,
        );
        let pf = ac::power_factor(&net)?;
        periods.push(PeriodReport {
            name: period.name.clone(),
            switched,
            ratio: net.q.abs() / net.p,
            pf: pf.magnitude,
            label: ac::label_pf(&pf, convention),
            net,
        });
    }
    let worst_ratio = periods.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let worst_pf = periods.iter().map(|p| p.pf).fold(1.0, f64::min);
    Ok(MultiPeriodEvaluation { periods, worst_ratio, worst_pf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ac::PfSense;
    use proptest::prelude::*;

    fn specs() -> Vec<PeriodSpec> {
        vec![
            PeriodSpec { name: "morning".into(), load: LoadSpec::Explicit { p: 10.0, q: 5.0 } },
            PeriodSpec {
                name: "afternoon".into(),
                load: LoadSpec::Apparent { s: 40.0, pf: 0.8, sense: PfSense::Lagging },
            },
            PeriodSpec { name: "evening".into(), load: LoadSpec::Unity { p: 10.0, q: None } },
        ]
    }

    fn close(a: f64, b: f64) -> bool {
        crate::Tolerance::IDENTITY.close(a, b)
    }

    fn fall_problem() -> MultiPeriodProblem {
        MultiPeriodProblem::from_specs(10e3, 60.0, &specs(), UnitScale::Mega).unwrap()
    }

    fn explicit(loads: &[(&str, f64, f64)]) -> MultiPeriodProblem {
        let specs: Vec<_> = loads
            .iter()
            .map(|&(name, p, q)| PeriodSpec { name: name.into(), load: LoadSpec::Explicit { p, q } })
            .collect();
        MultiPeriodProblem::from_specs(10e3, 60.0, &specs, UnitScale::Mega).unwrap()
    }

    #[test]
    fn grid_search_reproduces_reference_script() {
        let sol = grid_search(&fall_problem(), GridSpec::DEFAULT_FIXED, GridSpec::DEFAULT_SWITCHED).unwrap();
        assert_eq!(sol.worst_ratio, 0.25);
        assert_eq!(sol.states, vec![false, true, false]);
        assert_eq!(sol.q_cf, 2.5);
        assert_eq!(sol.q_cs, 13.5);
        assert!((sol.worst_pf - 0.9701).abs() < 5e-5);
        // X = -V^2 / Q
        assert!((sol.x_cf.unwrap() + 40.0).abs() < 1e-9);
    }

    #[test]
    fn unity_single_period_needs_nothing() {
        let p = explicit(&[("only", 10.0, 0.0)]);
        let sol = grid_search(&p, GridSpec::DEFAULT_FIXED, GridSpec::DEFAULT_SWITCHED).unwrap();
        assert_eq!((sol.worst_ratio, sol.q_cf, sol.q_cs), (0.0, 0.0, 0.0));
        assert_eq!(sol.x_cf, None);
    }

    #[test]
    fn symmetric_two_periods_pinned() {
        // capacitors only supply, so the period already supplying 5 MVAr
        // bounds the ratio at 0.5 and the first scanned design keeps it
        let p = explicit(&[("a", 10.0, 5.0), ("b", 10.0, -5.0)]);
        let fine = GridSpec { max: 10.0, step: 0.01 };
        let sol = grid_search(&p, fine, fine).unwrap();
        assert_eq!(sol.worst_ratio, 0.5);
        assert_eq!(sol.states, vec![false, false]);
        assert_eq!((sol.q_cf, sol.q_cs), (0.0, 0.0));
    }

    #[test]
    fn grid_errors() {
        let bad = GridSpec { max: 5.0, step: 0.0 };
        assert!(matches!(
            grid_search(&fall_problem(), bad, GridSpec::DEFAULT_SWITCHED),
            Err(MultiPeriodError::EmptyGrid { .. })
        ));
        let small = GridSpec { max: 1.0, step: 0.1 };
        assert!(matches!(grid_search(&fall_problem(), small, small), Err(MultiPeriodError::GridTooSmall(..))));
    }

    #[test]
    fn worst_ratio_values() {
        let p = fall_problem();
        let s = [false, true, false];
        for y in [21.5, 13.5, 25.0] {
            assert!(close(worst_ratio(&p, 2.5, y, &s).unwrap(), 0.25), "q_cs {y}");
        }
        // max(5/10, 24/32, 0/10)
        assert!(close(worst_ratio(&p, 0.0, 0.0, &[false; 3]).unwrap(), 0.75));
        assert!(matches!(worst_ratio(&p, 0.0, 0.0, &[false; 2]), Err(MultiPeriodError::StateCount { .. })));
        assert_eq!(worst_ratio(&p, -1.0, 0.0, &s), Err(MultiPeriodError::NegativeRating));
    }

    #[test]
    fn band_values() {
        let p = fall_problem();
        let s = [false, true, false];
        let (lo, hi) = optimal_band(&p, 2.5, &s, 0.25).unwrap();
        assert!((lo - 13.5).abs() < 1e-12 && (hi - 29.5).abs() < 1e-12);
        let (lo, hi) = optimal_band(&p, 2.5, &s, 0.0).unwrap();
        assert!(close(lo, 21.5) && close(hi, 21.5));
        assert_eq!(optimal_band(&p, 2.5, &[true, true, false], 0.25), Err(MultiPeriodError::NotSingleSwitched(2)));
        let (lo, hi) = optimal_band(&p, 2.5, &s, 0.1).unwrap();
        assert!(close(lo, 18.3) && close(hi, 24.7));
    }

    #[test]
    fn band_clipped_and_empty() {
        let p = explicit(&[("x", 10.0, 1.0)]);
        assert_eq!(optimal_band(&p, 0.0, &[true], 0.5).unwrap(), (0.0, 6.0));
        let p = explicit(&[("x", 10.0, -20.0)]);
        assert!(matches!(optimal_band(&p, 0.0, &[true], 0.5), Err(MultiPeriodError::TargetUnreachable { .. })));
    }

    #[test]
    fn band_edges_are_tight() {
        let p = fall_problem();
        let s = [false, true, false];
        for k in 135..=295 {
            let y = k as f64 / 10.0;
            assert!(worst_ratio(&p, 2.5, y, &s).unwrap() <= 0.25 + 1e-12, "q_cs {y}");
        }
        assert!(worst_ratio(&p, 2.5, 13.4, &s).unwrap() > 0.25);
        assert!(worst_ratio(&p, 2.5, 29.6, &s).unwrap() > 0.25);
    }

    #[test]
    fn solution_band_and_nulling_pick() {
        let p = fall_problem();
        let sol = grid_search(&p, GridSpec::DEFAULT_FIXED, GridSpec::DEFAULT_SWITCHED).unwrap().with_band(&p).unwrap();
        let (lo, hi) = sol.band.unwrap();
        assert!((lo - 13.5).abs() < 0.1 && (hi - 29.5).abs() < 0.1);
        assert!(close(sol.q_cs_nulling.unwrap(), 21.5));
    }

    #[test]
    fn evaluation_values() {
        let p = fall_problem();
        let sol = MultiPeriodSolution::from_design(&p, 2.5, 13.5, vec![false, true, false]).unwrap();
        let eval = evaluate_multiperiod(&p, &sol, LabelConvention::default()).unwrap();
        assert!((eval.worst_pf - 1.0 / (1.0f64 + 0.0625).sqrt()).abs() < 1e-12);
        assert!((eval.worst_pf - 0.9701).abs() < 5e-5);
        let morning = &eval.periods[0];
        assert_eq!(morning.net.q, 2.5);
        assert!((morning.pf - 10.0 / 10.0f64.hypot(2.5)).abs() < 1e-12);
        assert_eq!(morning.label, PfLabel::Leading);
        assert_eq!(eval.periods[2].label, PfLabel::Lagging);

        let unity = explicit(&[("only", 10.0, 0.0)]);
        let zero = MultiPeriodSolution::from_design(&unity, 0.0, 0.0, vec![false]).unwrap();
        let eval = evaluate_multiperiod(&unity, &zero, LabelConvention::default()).unwrap();
        assert_eq!(eval.worst_pf, 1.0);
        assert_eq!(eval.periods[0].label, PfLabel::Unity);
    }

    #[test]
    fn invalid_problems() {
        assert!(matches!(
            MultiPeriodProblem::from_specs(10e3, 60.0, &[], UnitScale::Mega),
            Err(MultiPeriodError::InvalidProblem(_))
        ));
        let dup = vec![
            PeriodSpec { name: "a".into(), load: LoadSpec::Explicit { p: 1.0, q: 0.0 } },
            PeriodSpec { name: "a".into(), load: LoadSpec::Explicit { p: 1.0, q: 0.0 } },
        ];
        assert!(matches!(
            MultiPeriodProblem::from_specs(10e3, 60.0, &dup, UnitScale::Mega),
            Err(MultiPeriodError::InvalidProblem(_))
        ));
        let nonpositive = vec![PeriodSpec { name: "a".into(), load: LoadSpec::Explicit { p: 0.0, q: 1.0 } }];
        assert!(MultiPeriodProblem::from_specs(10e3, 60.0, &nonpositive, UnitScale::Mega).is_err());
    }

    fn small_problem() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((1.0f64..20.0, -5.0f64..20.0), 1..=3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn worst_pf_matches_evaluation(loads in small_problem(), q_cf in 0.0f64..10.0, q_cs in 0.0f64..10.0, mask in 0u8..8) {
            let named: Vec<(String, f64, f64)> = loads.iter().enumerate().map(|(i, &(p, q))| (format!("p{i}"), p, q)).collect();
            let refs: Vec<(&str, f64, f64)> = named.iter().map(|(n, p, q)| (n.as_str(), *p, *q)).collect();
            let problem = explicit(&refs);
            let states: Vec<bool> = (0..loads.len()).map(|i| mask >> i & 1 == 1).collect();
            let sol = MultiPeriodSolution::from_design(&problem, q_cf, q_cs, states).unwrap();
            let eval = evaluate_multiperiod(&problem, &sol, LabelConvention::default()).unwrap();
            prop_assert!((sol.worst_pf - eval.worst_pf).abs() <= 1e-12);
        }

        #[test]
        fn search_beats_any_grid_design(loads in small_problem(), xi in 0usize..=20, yi in 0usize..=40, mask in 0u8..8) {
            let named: Vec<(String, f64, f64)> = loads.iter().enumerate().map(|(i, &(p, q))| (format!("p{i}"), p, q)).collect();
            let refs: Vec<(&str, f64, f64)> = named.iter().map(|(n, p, q)| (n.as_str(), *p, *q)).collect();
            let problem = explicit(&refs);
            let cf = GridSpec { max: 10.0, step: 0.5 };
            let cs = GridSpec { max: 20.0, step: 0.5 };
            let sol = grid_search(&problem, cf, cs).unwrap();
            let states: Vec<bool> = (0..loads.len()).map(|i| mask >> i & 1 == 1).collect();
            let manual = worst_ratio(&problem, xi as f64 * 0.5, yi as f64 * 0.5, &states).unwrap();
            prop_assert!(sol.worst_ratio <= manual);
        }

        #[test]
        fn permutation_invariance(loads in small_problem(), rot in 0usize..3) {
            let named: Vec<(String, f64, f64)> = loads.iter().enumerate().map(|(i, &(p, q))| (format!("p{i}"), p, q)).collect();
            let refs: Vec<(&str, f64, f64)> = named.iter().map(|(n, p, q)| (n.as_str(), *p, *q)).collect();
            let mut rotated = refs.clone();
            rotated.rotate_left(rot % refs.len());
            let g = GridSpec { max: 20.0, step: 0.5 };
            let a = grid_search(&explicit(&refs), g, g).unwrap();
            let b = grid_search(&explicit(&rotated), g, g).unwrap();
            prop_assert_eq!(a.worst_ratio, b.worst_ratio);
            prop_assert_eq!(a.q_cf, b.q_cf);
            prop_assert_eq!(a.q_cs, b.q_cs);
            let mut sa: Vec<_> = named.iter().map(|(n, _, _)| n.clone()).zip(a.states.clone()).collect();
            let mut sb: Vec<_> = rotated.iter().map(|(n, _, _)| n.to_string()).zip(b.states.clone()).collect();
            sa.sort();
            sb.sort();
            prop_assert_eq!(sa, sb);
        }
    }
}
