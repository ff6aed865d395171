//! On-disk formats: problem files, solution documents, and atomic writes.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use varcomp::ac::UnitScale;
use varcomp::grader::GradeConfig;
use varcomp::multiperiod::{GridSpec, MultiPeriodProblem, PeriodSpec};
use varcomp::powerflow::{NewtonSettings, Network};
use varcomp::switched::CompensationProblem;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoltageUnit {
    V,
    #[serde(rename = "kV")]
    Kv,
    #[serde(rename = "pu")]
    PerUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerUnit {
    /// W, VAr, VA
    Base,
    /// MW, MVAr, MVA
    Mega,
    #[serde(rename = "pu")]
    PerUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub voltage: VoltageUnit,
    pub power: PowerUnit,
}

/// Settings a problem file may carry; flags and `VARCOMP_*` variables win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub method: Option<Method>,
    pub grid_step: Option<f64>,
    pub samples: Option<usize>,
    pub cf_grid: Option<GridSpec>,
    pub cs_grid: Option<GridSpec>,
    pub newton: Option<NewtonSettings>,
    pub grade: Option<GradeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemBody {
    ContinuousCompensation {
        v_rms: f64,
        frequency: f64,
        p_d: f64,
        q_min: f64,
        q_max: f64,
    },
    MultiPeriod {
        v_rms: f64,
        frequency: f64,
        periods: Vec<PeriodSpec>,
    },
    Powerflow {
        network: Network,
    },
}

impl ProblemBody {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemBody::ContinuousCompensation { .. } => "continuous-compensation",
            ProblemBody::MultiPeriod { .. } => "multi-period",
            ProblemBody::Powerflow { .. } => "powerflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema_version: u32,
    pub units: Units,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(flatten)]
    pub body: ProblemBody,
}

/// A problem resolved into solver units.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Continuous(CompensationProblem),
    MultiPeriod(MultiPeriodProblem),
    PowerFlow(Network),
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file: ProblemFile = read_json(path)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::parse(path, format!("unsupported schema_version {}", file.schema_version)));
        }
        Ok(file)
    }

    pub fn resolve(&self) -> Result<Problem, CliError> {
        let Units { voltage, power } = self.units;
        let volts = |v: f64| match voltage {
            VoltageUnit::V => Ok(v),
            VoltageUnit::Kv => Ok(v * 1e3),
            VoltageUnit::PerUnit => Err(CliError::Input(format!("{} problems need volts or kV", self.body.kind()))),
        };
        let scale = || match power {
            PowerUnit::Base => Ok(UnitScale::Base),
            PowerUnit::Mega => Ok(UnitScale::Mega),
            PowerUnit::PerUnit => Err(CliError::Input(format!("{} problems need base or mega power", self.body.kind()))),
        };
        match &self.body {
            &ProblemBody::ContinuousCompensation { v_rms, frequency, p_d, q_min, q_max } => {
                let k = scale()?.factor();
                let problem =
                    CompensationProblem { v_rms: volts(v_rms)?, frequency, p_d: p_d * k, q_min: q_min * k, q_max: q_max * k };
                problem.validate()?;
                Ok(Problem::Continuous(problem))
            }
            ProblemBody::MultiPeriod { v_rms, frequency, periods } => Ok(Problem::MultiPeriod(
                MultiPeriodProblem::from_specs(volts(*v_rms)?, *frequency, periods, scale()?)?,
            )),
            ProblemBody::Powerflow { network } => {
                if (voltage, power) != (VoltageUnit::PerUnit, PowerUnit::PerUnit) {
                    return Err(CliError::Input("powerflow problems are stated in per-unit".into()));
                }
                Ok(Problem::PowerFlow(network.clone()))
            }
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Writes `contents` to `path` through a sibling temp file and a rename,
/// or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        print!("{contents}");
        return std::io::stdout().flush().map_err(|source| CliError::Write { path: "<stdout>".into(), source });
    };
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}
