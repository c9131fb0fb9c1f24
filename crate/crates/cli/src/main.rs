//! Command-line pipeline for adiabatic quantum binary clustering.

mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success, 1 I/O or data error, 2 configuration error,
/// 3 numerical instability, 4 degenerate clustering.
pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INSTABILITY: u8 = 3;
pub const EXIT_DEGENERATE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qclust",
    version,
    about = "Binary clustering via Ising models and simulated adiabatic quantum evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: center, Gram, Ising, anneal, decode.
    Run(RunArgs),
    /// Enumerate all spin configurations and report the ground states.
    Brute(BruteArgs),
    /// Generate a centered two-blob sample as CSV.
    GenBlobs(GenBlobsArgs),
    /// Check the scatter decomposition on random assignments.
    VerifyAnova(VerifyAnovaArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DataSource {
    /// CSV input, one point per line, comma-separated features.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Generate blobs of these sizes instead of reading a file.
    #[arg(long, value_name = "N1,N2")]
    blobs: Option<String>,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    source: DataSource,
    /// Blob centers, one per cluster.
    #[arg(long, value_name = "X,Y;X,Y", default_value = "-3,0;1,0")]
    centers: String,
    /// Blob standard deviation.
    #[arg(long, default_value_t = 0.3)]
    spread: f64,
    /// The input CSV has a header row.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct ModelArgs {
    /// Ising model variant.
    #[arg(long, value_enum, default_value_t = ModelKind::Full)]
    model: ModelKind,
    /// 1-based point pinned to cluster 1; required by (and only valid
    /// for) the reduced model.
    #[arg(long, value_name = "K")]
    fixed_index: Option<usize>,
    /// Kernel spec: linear, rbf:<gamma>, or poly:<degree>:<coef0>.
    #[arg(long, default_value = "linear")]
    kernel: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Full,
    Reduced,
}

impl ModelKind {
    fn name(self) -> &'static str {
        match self {
            ModelKind::Full => "full",
            ModelKind::Reduced => "reduced",
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Total anneal time.
    #[arg(long, default_value_t = 75.0)]
    tau: f64,
    /// Integrator steps; defaults to a count that holds the norm-drift
    /// budget.
    #[arg(long)]
    steps: Option<usize>,
    /// Trace sample count.
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Rescale the problem diagonal to unit peak energy.
    #[arg(long, value_name = "BOOL", default_value_t = true, action = ArgAction::Set)]
    normalize_energy: bool,
    /// Seed for blob generation and the Lloyd baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result JSON path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Trace CSV path (not written when omitted).
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BruteArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Seed for blob generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenBlobsArgs {
    /// Points in the first blob.
    #[arg(long)]
    n1: usize,
    /// Points in the second blob.
    #[arg(long)]
    n2: usize,
    /// Blob centers, one per cluster.
    #[arg(long, value_name = "X,Y;X,Y", default_value = "-3,0;1,0")]
    centers: String,
    /// Blob standard deviation.
    #[arg(long, default_value_t = 0.3)]
    spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write a header row.
    #[arg(long)]
    header: bool,
    /// CSV output path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyAnovaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of random assignments to test.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Seed for blob generation and the random assignments.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Errors with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Core(qclust_core::Error),
    /// A verification subcommand found a violation.
    VerificationFailed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(err) => write!(f, "{err}"),
            CliError::Core(err) => write!(f, "{err}"),
            CliError::VerificationFailed(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

impl From<qclust_core::Error> for CliError {
    fn from(err: qclust_core::Error) -> Self {
        CliError::Core(err)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use qclust_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::VerificationFailed(_) => EXIT_IO,
            CliError::Core(err) => match err {
                E::NormDrift { .. } => EXIT_INSTABILITY,
                E::EmptyCluster(_) | E::Lloyd(_) => EXIT_DEGENERATE,
                E::InvalidKernel(_)
                | E::InvalidBlobSpec(_)
                | E::InvalidSchedule(_)
                | E::FixedIndexOutOfRange { .. }
                | E::QubitCap { .. }
                | E::EnumerationGuard { .. } => EXIT_CONFIG,
                _ => EXIT_IO,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => pipeline::run(args),
        Command::Brute(args) => pipeline::brute(args),
        Command::GenBlobs(args) => pipeline::gen_blobs(args),
        Command::VerifyAnova(args) => pipeline::verify_anova(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
