use std::path::Path;

use serde::{Deserialize, Serialize};
use varcomp::ac::LabelConvention;
use varcomp::grader::{self, Candidate, ContinuousCandidate, ErrorReport, GradeConfig, GradeError};
use varcomp::multiperiod::{self, GridSpec, MultiPeriodEvaluation, MultiPeriodSolution};
use varcomp::powerflow::{self, NewtonSettings, PowerFlowError, PowerFlowSolution};
use varcomp::switched::{self, CompensationProblem, DesignSolution, EvaluationReport};

use crate::error::{CliError, Exit};
use crate::files::{emit, read_json, to_pretty_json, Method, Problem, ProblemFile, SCHEMA_VERSION};
use crate::{DesignArgs, FormulateArgs, Format, GradeArgs, MultiperiodArgs, PowerflowArgs, SweepArgs};

const DEFAULT_GRID_STEP: f64 = 0.5;
const DEFAULT_SAMPLES: usize = 97;

/// Analytic and brute-force designs side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub grid_step: f64,
    pub worst_abs_qs_diff: f64,
    pub q_l_diff: f64,
    pub q_c_diff: f64,
    pub threshold_diff: f64,
    /// Worst |Q_s| agrees within one grid step.
    pub worst_within_step: bool,
    /// Every compared field agrees within one grid step.
    pub all_within_step: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDocument {
    pub schema_version: u32,
    pub kind: String,
    pub method: Method,
    pub problem: CompensationProblem,
    pub solution: DesignSolution,
    pub evaluation: EvaluationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute: Option<DesignSolution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Agreement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPeriodDocument {
    pub schema_version: u32,
    pub kind: String,
    pub cf_grid: GridSpec,
    pub cs_grid: GridSpec,
    pub solution: MultiPeriodSolution,
    pub evaluation: MultiPeriodEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFlowDocument {
    pub schema_version: u32,
    pub kind: String,
    pub settings: NewtonSettings,
    pub solution: PowerFlowSolution,
}

fn continuous(file: &ProblemFile) -> Result<CompensationProblem, CliError> {
    match file.resolve()? {
        Problem::Continuous(p) => Ok(p),
        _ => Err(CliError::Input(format!("expected a continuous-compensation problem, got {}", file.body.kind()))),
    }
}

pub fn design(args: DesignArgs) -> Result<Exit, CliError> {
    let file = ProblemFile::load(&args.problem)?;
    let problem = continuous(&file)?;
    let method = args.method.or(file.defaults.method).unwrap_or(Method::Analytic);
    let step = args.grid_step.or(file.defaults.grid_step).unwrap_or(DEFAULT_GRID_STEP);

    let analytic = || switched::design_minimax(&problem).map_err(|e| CliError::Solver(e.to_string()));
    let brute = || switched::brute_force_design(&problem, step).map_err(CliError::from);
    let (solution, brute_solution) = match method {
        Method::Analytic => (analytic()?, None),
        Method::Brute => (brute()?, None),
        Method::Both => (analytic()?, Some(brute()?)),
    };
    let agreement = brute_solution.as_ref().map(|b| agreement(&solution, b, step));
    let evaluation = switched::evaluate(&solution, &problem).map_err(|e| CliError::Solver(e.to_string()))?;
    let doc = DesignDocument {
        schema_version: SCHEMA_VERSION,
        kind: "continuous-design".into(),
        method,
        problem,
        solution,
        evaluation,
        brute: brute_solution,
        agreement,
    };
    emit(args.out.as_deref(), &to_pretty_json(&doc))?;
    match &doc.agreement {
        Some(a) if !a.worst_within_step => Err(CliError::Solver(format!(
            "brute-force and analytic worst |Q_s| differ by {} VAr, more than the {} VAr grid step",
            a.worst_abs_qs_diff, a.grid_step
        ))),
        _ => Ok(Exit::Success),
    }
}

fn agreement(analytic: &DesignSolution, brute: &DesignSolution, step: f64) -> Agreement {
    let slack = step * (1.0 + 1e-9);
    let worst = (analytic.worst_abs_qs - brute.worst_abs_qs).abs();
    let q_l = (analytic.q_l - brute.q_l).abs();
    let q_c = (analytic.q_c - brute.q_c).abs();
    let threshold = match (analytic.threshold, brute.threshold) {
        (Some(a), Some(b)) => (a - b).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    Agreement {
        grid_step: step,
        worst_abs_qs_diff: worst,
        q_l_diff: q_l,
        q_c_diff: q_c,
        threshold_diff: threshold,
        worst_within_step: worst <= slack,
        all_within_step: [worst, q_l, q_c, threshold].iter().all(|d| *d <= slack),
    }
}

/// The design a sweep evaluates: from a design document or a candidate.
fn load_design(path: &Path, problem: &CompensationProblem) -> Result<DesignSolution, CliError> {
    let value: serde_json::Value = read_json(path)?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or_default().to_string();
    match kind.as_str() {
        "continuous-design" => {
            let doc: DesignDocument = serde_json::from_value(value).map_err(|e| CliError::parse(path, e))?;
            if doc.schema_version != SCHEMA_VERSION {
                return Err(CliError::parse(path, format!("unsupported schema_version {}", doc.schema_version)));
            }
            let s = doc.solution;
            Ok(DesignSolution::from_reactances(problem, s.x_l, s.x_c, s.threshold)?)
        }
        "continuous-compensation" => {
            let Candidate::ContinuousCompensation(c) =
                serde_json::from_value::<Candidate>(value).map_err(|e| CliError::parse(path, e))?
            else {
                unreachable!("kind tag checked above")
            };
            candidate_design(&c, problem)
        }
        other => Err(CliError::parse(path, format!("expected a continuous design or candidate, got kind '{other}'"))),
    }
}

fn candidate_design(c: &ContinuousCandidate, problem: &CompensationProblem) -> Result<DesignSolution, CliError> {
    c.to_solution(problem).map_err(CliError::from)
}

pub fn sweep(args: SweepArgs) -> Result<Exit, CliError> {
    let file = ProblemFile::load(&args.problem)?;
    let problem = continuous(&file)?;
    let solution = load_design(&args.solution, &problem)?;
    let samples = args.samples.or(file.defaults.samples).unwrap_or(DEFAULT_SAMPLES);
    let convention = convention(args.convention, file.defaults.grade.map(|g| g.convention));
    let points = switched::qs_profile(&solution, &problem, samples, convention)?;
    emit(args.csv.as_deref(), &switched::profile_to_csv(&points))?;
    Ok(Exit::Success)
}

fn convention(flag: Option<crate::Convention>, file: Option<LabelConvention>) -> LabelConvention {
    flag.map(Into::into).or(file).unwrap_or_default()
}

pub fn multiperiod(args: MultiperiodArgs) -> Result<Exit, CliError> {
    let file = ProblemFile::load(&args.problem)?;
    let Problem::MultiPeriod(problem) = file.resolve()? else {
        return Err(CliError::Input(format!("expected a multi-period problem, got {}", file.body.kind())));
    };
    let grid = |max: Option<f64>, step: Option<f64>, file: Option<GridSpec>, default: GridSpec| {
        let base = file.unwrap_or(default);
        GridSpec { max: max.unwrap_or(base.max), step: step.unwrap_or(base.step) }
    };
    let cf_grid = grid(args.cf_max, args.cf_step, file.defaults.cf_grid, GridSpec::DEFAULT_FIXED);
    let cs_grid = grid(args.cs_max, args.cs_step, file.defaults.cs_grid, GridSpec::DEFAULT_SWITCHED);
    let mut solution = multiperiod::grid_search(&problem, cf_grid, cs_grid)?;
    if args.band {
        let switched = solution.states.iter().filter(|&&s| s).count();
        if switched == 1 {
            solution = solution.with_band(&problem)?;
        } else {
            eprintln!("varcomp: no band reported; the optimum switches {switched} periods, a band needs exactly one");
        }
    }
    let convention = convention(args.convention, file.defaults.grade.map(|g| g.convention));
    let evaluation = multiperiod::evaluate_multiperiod(&problem, &solution, convention)?;
    let doc = MultiPeriodDocument {
        schema_version: SCHEMA_VERSION,
        kind: "multi-period-solution".into(),
        cf_grid,
        cs_grid,
        solution,
        evaluation,
    };
    emit(args.out.as_deref(), &to_pretty_json(&doc))?;
    Ok(Exit::Success)
}

pub fn powerflow(args: PowerflowArgs) -> Result<Exit, CliError> {
    let file = ProblemFile::load(&args.network)?;
    let Problem::PowerFlow(network) = file.resolve()? else {
        return Err(CliError::Input(format!("expected a powerflow problem, got {}", file.body.kind())));
    };
    let base = file.defaults.newton.unwrap_or_default();
    let settings = NewtonSettings { tol: args.tol.unwrap_or(base.tol), max_iter: args.max_iter.unwrap_or(base.max_iter) };
    let document = |solution| PowerFlowDocument {
        schema_version: SCHEMA_VERSION,
        kind: "powerflow-solution".into(),
        settings,
        solution,
    };
    match powerflow::solve_network(&network, settings) {
        Ok(solution) => {
            emit(args.out.as_deref(), &to_pretty_json(&document(solution)))?;
            Ok(Exit::Success)
        }
        Err(PowerFlowError::NotConverged(snapshot)) => {
            let message =
                format!("no convergence within {} Newton steps, mismatch {:e}", settings.max_iter, snapshot.mismatch);
            emit(args.out.as_deref(), &to_pretty_json(&document(*snapshot)))?;
            Err(CliError::NotConverged(message))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn formulate(args: FormulateArgs) -> Result<Exit, CliError> {
    let file = ProblemFile::load(&args.network)?;
    let Problem::PowerFlow(network) = file.resolve()? else {
        return Err(CliError::Input(format!("expected a powerflow problem, got {}", file.body.kind())));
    };
    let formulation = powerflow::assemble_formulation(&network)?;
    let mut doc = powerflow::reference_document(&formulation);
    doc.provenance = Some("reference".into());
    emit(args.out.as_deref(), &to_pretty_json(&Candidate::PowerflowFormulation(doc)))?;
    Ok(Exit::Success)
}

pub fn grade(args: GradeArgs) -> Result<Exit, CliError> {
    let candidate: Candidate = read_json(&args.candidate)?;
    let file = ProblemFile::load(&args.problem)?;
    let base = file.defaults.grade.unwrap_or_default();
    let config = GradeConfig {
        reactance_rel: args.reactance_rel.unwrap_or(base.reactance_rel),
        pf_rel: args.pf_rel.unwrap_or(base.pf_rel),
        threshold_abs: args.threshold_abs.unwrap_or(base.threshold_abs),
        power_rel: args.power_rel.unwrap_or(base.power_rel),
        residual_abs: args.residual_abs.unwrap_or(base.residual_abs),
        convention: convention(args.convention, Some(base.convention)),
    };
    let report = grade_candidate(&candidate, &file.resolve()?, &config)?;
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(if report.is_clean() { Exit::Success } else { Exit::Findings })
}

fn grade_candidate(candidate: &Candidate, problem: &Problem, config: &GradeConfig) -> Result<ErrorReport, CliError> {
    let report = match (candidate, problem) {
        (Candidate::ContinuousCompensation(c), Problem::Continuous(p)) => grader::grade_continuous(c, p, config),
        (Candidate::MultiPeriod(c), Problem::MultiPeriod(p)) => grader::grade_multiperiod(c, p, config),
        (Candidate::PowerflowFormulation(c), Problem::PowerFlow(n)) => grader::grade_powerflow(c, n, config),
        (c, p) => Err(GradeError::KindMismatch {
            candidate: c.kind().as_str().into(),
            problem: match p {
                Problem::Continuous(_) => "continuous-compensation",
                Problem::MultiPeriod(_) => "multi-period",
                Problem::PowerFlow(_) => "powerflow",
            }
            .into(),
        }),
    };
    Ok(report?)
}
