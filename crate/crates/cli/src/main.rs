//! `aluthge`: command-line front end for Aluthge transform experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aluthge_core::Error;

#[derive(Parser, Debug)]
#[command(name = "aluthge", version, about = "Aluthge transform iteration and orbit-geometry checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Convergence threshold on ‖Δ^{k+1} − Δ^k‖₂
    #[arg(long, global = true)]
    pub tol_conv: Option<f64>,
    /// Threshold on the normality residual of the limit
    #[arg(long, global = true)]
    pub tol_norm: Option<f64>,
    /// Maximum number of transform applications
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Seed for random instances and directions
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for every file the command writes
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply Δ once and write the result
    Transform {
        input: PathBuf,
        #[arg(long, default_value = "transform.json")]
        output: String,
    },
    /// Apply Δ a fixed number of times and write the trajectory
    Iterate {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Also write every iterate as JSON
        #[arg(long)]
        dump_iterates: bool,
    },
    /// Iterate Δ to its limit
    Limit { input: PathBuf },
    /// Contraction constant k_D and local-diffeomorphism flag of a diagonal
    Kd {
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
    },
    /// Write the derivative kit of a diagonal
    Kit {
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
        #[arg(long, default_value = "kit.json")]
        output: String,
    },
    /// Compare the analytic derivative at a diagonal with finite differences
    DerivCheck {
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = aluthge_core::orbit::DEFAULT_STEP)]
        step: f64,
    },
    /// Run a batch suite described by a TOML file
    Suite { config: PathBuf },
    /// Write a seeded random diagonalizable matrix
    Random {
        #[arg(long)]
        size: usize,
        /// Comma-separated eigenvalues; an annulus sample when absent
        #[arg(long, allow_hyphen_values = true)]
        eigenvalues: Option<String>,
        #[arg(long, default_value_t = 100.0)]
        cond: f64,
        #[arg(long, default_value = "random.json")]
        output: String,
    },
    /// Algebraic and geometric multiplicity of an eigenvalue along the trajectory
    Multiplicity {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value_t = 0)]
        steps: usize,
    },
    /// Measured convergence rate against k_D of the limit
    Rate {
        input: PathBuf,
        /// Diagonal of the limit's unitary orbit; taken from the limit's spectrum when absent
        #[arg(long, allow_hyphen_values = true)]
        diag: Option<String>,
        #[arg(long, default_value_t = aluthge_core::experiments::DEFAULT_RATE_SLACK)]
        slack: f64,
    },
}

/// Failure categories mapped to stable exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    NotConverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::NotConverged(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn init_logging() -> Result<(), Failure> {
    let level = match std::env::var("ALUTHGE_LOG").as_deref() {
        Err(_) => log::LevelFilter::Warn,
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        Ok(other) => return Err(Failure::Usage(format!("ALUTHGE_LOG must be quiet, info or debug, got {other:?}"))),
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_logging().and_then(|_| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Numerical(msg) | Failure::NotConverged(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
