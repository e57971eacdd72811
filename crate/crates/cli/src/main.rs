//! `ramsey` — command-line access to the quantum Fisher information
//! toolkit: exact vs analytic QFI, bounds, interrogation-time optimization,
//! the uniform-division check, N-sweeps, and figure data.
//!
//! Every run emits one machine-readable artifact (JSON envelope or CSV) and
//! is deterministic: the same flags produce byte-identical output. Errors
//! are single-line `error: <code>: <message>` on stderr with exit code 2
//! for usage problems and 1 for domain problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

const UNITS_NOTE: &str = "All physical quantities are in user-chosen consistent units (gamma in \
                          1/time, T and t in time); no unit conversion is performed.";

#[derive(Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Quantum Fisher information for N-qubit Ramsey frequency estimation under Gaussian \
             dephasing",
    after_help = UNITS_NOTE
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact (SLD-solver) and analytic QFI of one dephased state
    Qfi(QfiArgs),
    /// Evaluate the closed-form bounds at one parameter point
    Bounds(BoundsArgs),
    /// Optimal interrogation time under a total time budget
    Optimize(OptimizeArgs),
    /// Numerically probe the uniform time-division claim
    VerifyUniform(VerifyUniformArgs),
    /// Sweep the maximal QFI over N and fit the scaling exponent
    Scaling(ScalingArgs),
    /// Emit the resolution-scaling figure lines
    Figure(FigureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Local,
    Collective,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the artifact to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct QfiArgs {
    /// Initial state: ghz, css, or random:<seed>
    #[arg(long)]
    state: String,
    /// Number of two-level atoms
    #[arg(long)]
    n: usize,
    /// Interrogation time
    #[arg(long)]
    t: f64,
    /// Decoherence model: markovian, zeno, or tabulated:<path>
    #[arg(long)]
    model: String,
    /// Rate parameter for the markovian/zeno models (1/time)
    #[arg(long)]
    gamma: Option<f64>,
    /// Noise geometry
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Number of two-level atoms
    #[arg(long)]
    n: usize,
    /// Interrogation time for the single-experiment bounds
    #[arg(long)]
    t: f64,
    /// Decoherence model: markovian, zeno, or tabulated:<path>
    #[arg(long)]
    model: String,
    /// Rate parameter for the markovian/zeno models (1/time)
    #[arg(long)]
    gamma: Option<f64>,
    /// Initial factor I_rho (defaults to the maximum N^2)
    #[arg(long = "i-rho", conflicts_with = "state")]
    i_rho: Option<f64>,
    /// Derive I_rho from this state (ghz, css, or random:<seed>) instead
    #[arg(long)]
    state: Option<String>,
    /// Total time budget; adds the total-time bounds for the model family
    #[arg(long = "t-total")]
    t_total: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
pub struct OptimizeArgs {
    /// Initial state: ghz, css, or random:<seed>
    #[arg(long)]
    state: String,
    /// Number of two-level atoms
    #[arg(long)]
    n: usize,
    /// Noise geometry
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    /// Decoherence model: markovian, zeno, or tabulated:<path>
    #[arg(long)]
    model: String,
    /// Rate parameter for the markovian/zeno models (1/time)
    #[arg(long)]
    gamma: Option<f64>,
    /// Total time budget T
    #[arg(long = "t-total")]
    t_total: f64,
    /// Lower edge of the numeric search bracket (defaults per model)
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    /// Upper edge of the numeric search bracket (defaults per model)
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
pub struct VerifyUniformArgs {
    /// Number of experiments n the budget is divided into
    #[arg(long = "n-experiments")]
    n_experiments: usize,
    /// Total time budget T
    #[arg(long = "t-total")]
    t_total: f64,
    /// Bracket constant c (1/N for local noise, 1/N^2 for collective)
    #[arg(long)]
    c: f64,
    /// Zeno gamma (1/time)
    #[arg(long)]
    gamma: f64,
    /// Random restarts on top of the uniform start
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Seed for the restart draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
pub struct ScalingArgs {
    /// State family: ghz or css
    #[arg(long)]
    state: String,
    /// Noise geometry
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    /// Decoherence model: markovian or zeno
    #[arg(long)]
    model: String,
    /// Rate parameter (1/time)
    #[arg(long)]
    gamma: f64,
    /// Total time budget T
    #[arg(long = "t-total")]
    t_total: f64,
    /// Smallest N in the sweep
    #[arg(long = "n-min", default_value_t = 10)]
    n_min: u64,
    /// Largest N in the sweep
    #[arg(long = "n-max", default_value_t = 10_000)]
    n_max: u64,
    /// Log-spaced grid density
    #[arg(long = "points-per-decade", default_value_t = 20)]
    points_per_decade: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
pub struct FigureArgs {
    /// Smallest N on the lines
    #[arg(long = "n-min", default_value_t = 10)]
    n_min: u64,
    /// Largest N on the lines
    #[arg(long = "n-max", default_value_t = 10_000)]
    n_max: u64,
    /// Total time budget T
    #[arg(long = "t-total")]
    t_total: f64,
    /// Dephasing rate gamma (1/time)
    #[arg(long)]
    gamma: f64,
    /// Log-spaced grid density
    #[arg(long = "points-per-decade", default_value_t = 20)]
    points_per_decade: usize,
    #[command(flatten)]
    out: OutputArgs,
}

/// Usage errors exit 2, domain errors exit 1.
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl From<ramsey_core::Error> for CliError {
    fn from(err: ramsey_core::Error) -> Self {
        CliError::Domain(err.to_string())
    }
}

fn single_line(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("; ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            let message = err.to_string();
            let message = message.strip_prefix("error: ").unwrap_or(&message);
            let first = message.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Qfi(args) => commands::run_qfi(args),
        Command::Bounds(args) => commands::run_bounds(args),
        Command::Optimize(args) => commands::run_optimize(args),
        Command::VerifyUniform(args) => commands::run_verify_uniform(args),
        Command::Scaling(args) => commands::run_scaling(args),
        Command::Figure(args) => commands::run_figure(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: usage: {}", single_line(&message));
            ExitCode::from(2)
        }
        Err(CliError::Domain(message)) => {
            eprintln!("error: domain: {}", single_line(&message));
            ExitCode::from(1)
        }
    }
}
