use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod io;

/// Ordinal-pattern dependence estimators and simulation tools.
#[derive(Parser, Debug)]
#[command(name = "ordpat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate a dependence measure from a CSV file with `x` and `y` columns.
    Estimate(EstimateArgs),
    /// Simulate a bivariate process and write it as CSV.
    Simulate(SimulateArgs),
    /// Run a replicated simulation experiment from a config file.
    Experiment(ExperimentArgs),
    /// Evaluate a closed-form population value.
    Analytic {
        #[command(subcommand)]
        formula: Formula,
    },
}

#[derive(clap::Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// opd, opd-signed, kendall or pearson.
    #[arg(long, default_value = "opd")]
    pub method: String,
    #[arg(long, default_value_t = 1)]
    pub h: usize,
    /// Pair the x window at i with the y window at i + shift (opd only).
    #[arg(long, default_value_t = 0)]
    pub shift: usize,
    #[arg(long, default_value_t = ordpat::estimate::DEFAULT_CONFIDENCE)]
    pub confidence: f64,
    /// Long-run variance bandwidth for kendall (default floor(m^(1/3))).
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Print the column names before the record.
    #[arg(long)]
    pub header: bool,
}

#[derive(clap::Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub family: String,
    /// Family parameters separated by `,` or `:`, e.g. `0.7,-0.7`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; overrides the config value.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Formula {
    /// (2/pi) asin(r) for increment correlation r.
    #[command(name = "opd1-gauss")]
    Opd1Gauss {
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
    },
    /// Order-1 OPD of the bivariate AR(1) with matrix (a b; b -a).
    #[command(name = "ar1-opd1")]
    Ar1Opd1 {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    /// Order-1 OPD between an AR(1) path and its one-step shift.
    #[command(name = "shifted-ar1-opd1")]
    ShiftedAr1Opd1 {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
    },
    /// P(U <= 0, V <= 0) for a standard bivariate normal.
    #[command(name = "orthant2")]
    Orthant2 {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
    },
}

/// Failure carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input file, flags or config: exit 2.
    Input(String),
    /// Numerical or estimator failure: exit 3.
    Estimator(ordpat::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Estimator(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Estimator(e) => write!(f, "{}: {e}", e.name()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => commands::estimate(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Experiment(args) => commands::experiment(&args),
        Command::Analytic { formula } => commands::analytic(&formula),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
