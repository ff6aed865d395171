//! `varcomp` command-line front end.

mod commands;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use varcomp::ac::LabelConvention;

use crate::files::Method;

#[derive(Debug, Parser)]
#[command(name = "varcomp", version, about = "Switched reactive compensation design, AC power flow, and solution grading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Min-max design of a continuous-range switched compensator.
    Design(DesignArgs),
    /// Sample the source reactive power across the demand range as CSV.
    Sweep(SweepArgs),
    /// Exhaustive design of fixed and switched capacitors over load periods.
    Multiperiod(MultiperiodArgs),
    /// Solve a power-flow network with a distributed slack.
    Powerflow(PowerflowArgs),
    /// Grade a candidate solution against its problem.
    Grade(GradeArgs),
    /// Write the reference formulation of a power-flow network.
    Formulate(FormulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    SupplyLeading,
    Classical,
}

impl From<Convention> for LabelConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::SupplyLeading => LabelConvention::SupplyLeading,
            Convention::Classical => LabelConvention::Classical,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct DesignArgs {
    problem: PathBuf,
    #[arg(long, env = "VARCOMP_METHOD", value_enum)]
    method: Option<Method>,
    /// VAr spacing of the brute-force grids.
    #[arg(long, env = "VARCOMP_GRID_STEP")]
    grid_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    problem: PathBuf,
    /// A design document or a continuous-compensation candidate.
    solution: PathBuf,
    #[arg(long, env = "VARCOMP_SAMPLES")]
    samples: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, env = "VARCOMP_CONVENTION", value_enum)]
    convention: Option<Convention>,
}

#[derive(Debug, Args)]
struct MultiperiodArgs {
    problem: PathBuf,
    #[arg(long, env = "VARCOMP_CF_MAX")]
    cf_max: Option<f64>,
    #[arg(long, env = "VARCOMP_CF_STEP")]
    cf_step: Option<f64>,
    #[arg(long, env = "VARCOMP_CS_MAX")]
    cs_max: Option<f64>,
    #[arg(long, env = "VARCOMP_CS_STEP")]
    cs_step: Option<f64>,
    /// Also report the range of switched ratings that keep the optimum.
    #[arg(long)]
    band: bool,
    #[arg(long, env = "VARCOMP_CONVENTION", value_enum)]
    convention: Option<Convention>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PowerflowArgs {
    network: PathBuf,
    #[arg(long, env = "VARCOMP_TOL")]
    tol: Option<f64>,
    #[arg(long, env = "VARCOMP_MAX_ITER")]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GradeArgs {
    candidate: PathBuf,
    problem: PathBuf,
    #[arg(long, env = "VARCOMP_REACTANCE_REL")]
    reactance_rel: Option<f64>,
    #[arg(long, env = "VARCOMP_PF_REL")]
    pf_rel: Option<f64>,
    #[arg(long, env = "VARCOMP_THRESHOLD_ABS")]
    threshold_abs: Option<f64>,
    #[arg(long, env = "VARCOMP_POWER_REL")]
    power_rel: Option<f64>,
    #[arg(long, env = "VARCOMP_RESIDUAL_ABS")]
    residual_abs: Option<f64>,
    #[arg(long, env = "VARCOMP_CONVENTION", value_enum)]
    convention: Option<Convention>,
    #[arg(long, env = "VARCOMP_FORMAT", value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FormulateArgs {
    network: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(a) => commands::design(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Multiperiod(a) => commands::multiperiod(a),
        Command::Powerflow(a) => commands::powerflow(a),
        Command::Grade(a) => commands::grade(a),
        Command::Formulate(a) => commands::formulate(a),
    };
    match result {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("varcomp: {e}");
            e.exit().into()
        }
    }
}
