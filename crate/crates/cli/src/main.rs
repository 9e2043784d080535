mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Compute(#[from] ssflab::Error),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Compute(e) => match e {
                ssflab::Error::Geometry(_) | ssflab::Error::InvalidArgument(_) | ssflab::Error::Domain(_) => 2,
                _ => 1,
            },
            CliError::Invariant(_) | CliError::Io(_) => 1,
        }
    }
}

/// Flags shared by every command; each overrides the config file.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON config, or a previous output whose header is re-run.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Quadrature or agreement tolerance, depending on the command.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Parser)]
#[command(name = "ssflab", version, about = "Capacity, Landau-level Toeplitz spectra and spectral shift asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Logarithmic capacity from Fekete points.
    Capacity {
        #[command(flatten)]
        common: Common,
        /// Planar set JSON.
        #[arg(long, value_name = "PATH")]
        geometry: Option<PathBuf>,
        /// Fekete sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Spectrum of the compressed indicator in one Landau level.
    Toeplitz {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        geometry: Option<PathBuf>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        b: Option<f64>,
        /// Largest angular momentum index.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        cap: Option<f64>,
    },
    /// Threshold prediction for the spectral shift function.
    Ssf {
        #[command(flatten)]
        common: Common,
        /// Obstacle JSON; its transverse projection supplies the capacity.
        #[arg(long, value_name = "PATH")]
        obstacle: Option<PathBuf>,
        /// Capacity of the projection, skipping the estimate.
        #[arg(long)]
        cap: Option<f64>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, value_parser = ["dirichlet", "neumann"])]
        boundary: Option<String>,
        /// Schedule of ln lambda values, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        ln_lambda: Option<Vec<f64>>,
    },
    /// Run a named property suite; `all` runs every suite.
    Verify {
        #[command(flatten)]
        common: Common,
        suite: Option<String>,
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Effective planar potential of a Gaussian cutoff.
    Effective {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        b: Option<f64>,
        /// Also compare the two quadratic forms on this many coefficients minus one.
        #[arg(long)]
        k_check: Option<usize>,
    },
    /// Hilbert-Schmidt norms of the cut-off 1D resolvent kernels.
    Resolvent {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        energy: Option<Vec<f64>>,
        #[arg(long, value_parser = ["plain", "tilde"])]
        variant: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Capacity { common, geometry, n } => commands::capacity(&common, geometry, n),
        Command::Toeplitz { common, geometry, q, b, k, cap } => commands::toeplitz(&common, geometry, q, b, k, cap),
        Command::Ssf { common, obstacle, cap, q, b, boundary, ln_lambda } => {
            commands::ssf(&common, obstacle, cap, q, b, boundary, ln_lambda)
        }
        Command::Verify { common, suite, instances } => commands::verify(&common, suite, instances),
        Command::Effective { common, q, b, k_check } => commands::effective(&common, q, b, k_check),
        Command::Resolvent { common, energy, variant } => commands::resolvent(&common, energy, variant),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
