//! `cmax`: extractable qubit-reservoir concurrence from the command line.
//!
//! Exit status: 0 success, 1 numeric or domain failure, 2 usage error.
//! `CMAX_THREADS` sets the sweep worker count; it never changes output.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

pub const THREADS_ENV: &str = "CMAX_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cmax",
    version,
    about = "Extractable qubit-reservoir concurrence for Lorentzian reservoirs"
)]
struct Cli {
    /// Flat key = value file of defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Lindblad,
    Multimode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    FlipCouplingSign,
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    /// Local error tolerance of the Lindblad integrator.
    #[arg(long, default_value_t = cmax_core::lindblad::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// Number of bath modes for the multimode method.
    #[arg(long, default_value_t = cmax_core::multimode::DEFAULT_MODES, value_parser = at_least_two)]
    pub modes: usize,
    /// Bath half-width in units of kappa for the multimode method.
    #[arg(long, default_value_t = cmax_core::multimode::DEFAULT_WINDOW, value_parser = positive)]
    pub window: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time series at one xi.
    Evolve {
        #[arg(long, value_parser = positive)]
        xi: f64,
        #[arg(long, default_value_t = 3.0, value_parser = positive)]
        tau_max: f64,
        #[arg(long, default_value_t = 301, value_parser = at_least_two)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Concurrence over a (xi, tau) grid.
    Heatmap {
        #[arg(long, default_value_t = 0.01, value_parser = positive)]
        xi_min: f64,
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        xi_max: f64,
        #[arg(long, default_value_t = 81, value_parser = at_least_two)]
        xi_steps: usize,
        #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
        xi_scale: ScaleArg,
        #[arg(long, default_value_t = 3.0, value_parser = positive)]
        tau_max: f64,
        #[arg(long, default_value_t = 301, value_parser = at_least_two)]
        tau_steps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximum concurrence and its derivative versus xi.
    Cmax {
        #[arg(long, default_value_t = 0.01, value_parser = positive)]
        xi_min: f64,
        #[arg(long, default_value_t = 100.0, value_parser = positive)]
        xi_max: f64,
        #[arg(long, default_value_t = 200, value_parser = at_least_two)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
        scale: ScaleArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sideband coupling g*J_n(epsilon/nu), or the amplitude reaching a target xi.
    Sideband {
        #[arg(long, value_parser = positive)]
        g: f64,
        #[arg(long, value_parser = positive)]
        kappa: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = positive)]
        nu: f64,
        #[arg(long, conflicts_with = "epsilon", required_unless_present = "epsilon")]
        target_xi: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Qubit frequency, to validate nu = (omega_r - omega_q)/n.
        #[arg(long, requires = "omega_r")]
        omega_q: Option<f64>,
        #[arg(long, requires = "omega_q")]
        omega_r: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-checks of the closed form against both oracles.
    Verify {
        /// Coarse grids (default).
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        /// The complete budgets.
        #[arg(long)]
        full: bool,
        /// Corrupt the Lindblad generator to confirm the checks catch it.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} must be positive and finite"))
    }
}

fn at_least_two(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))?;
    if n >= 2 {
        Ok(n)
    } else {
        Err(format!("{s} must be at least 2"))
    }
}

/// A failure and the exit status it maps to.
pub enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<cmax_core::Error> for Failure {
    fn from(e: cmax_core::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("output: {e}"))
    }
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Evolve {
            xi,
            tau_max,
            steps,
            method,
            numeric,
            output,
        } => commands::evolve(xi, tau_max, steps, method, &numeric, threads)?
            .emit(output.format, output.out.as_deref())?,
        Command::Heatmap {
            xi_min,
            xi_max,
            xi_steps,
            xi_scale,
            tau_max,
            tau_steps,
            method,
            numeric,
            output,
        } => {
            let spec = commands::HeatmapSpec {
                xi_min,
                xi_max,
                xi_steps,
                xi_scale,
                tau_max,
                tau_steps,
                method,
            };
            commands::heatmap(&spec, &numeric, threads)?.emit(output.format, output.out.as_deref())?
        }
        Command::Cmax {
            xi_min,
            xi_max,
            steps,
            scale,
            output,
        } => commands::cmax(xi_min, xi_max, steps, scale, threads)?.emit(output.format, output.out.as_deref())?,
        Command::Sideband {
            g,
            kappa,
            n,
            nu,
            target_xi,
            epsilon,
            omega_q,
            omega_r,
            output,
        } => {
            let spec = commands::SidebandSpec {
                g,
                kappa,
                n,
                nu,
                target_xi,
                epsilon,
                omega_q,
                omega_r,
            };
            commands::sideband(&spec)?.emit(output.format, output.out.as_deref())?
        }
        Command::Verify {
            quick: _,
            full,
            mutate,
            output,
        } => {
            let (table, passed) = commands::verify(full, mutate);
            table.emit(output.format, output.out.as_deref())?;
            if !passed {
                return Err(Failure::Numeric("verification failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(config::ConfigError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
