//! Command-line orchestration for the k-trace toolkit.
//!
//! Exit codes: 0 success, 1 property violation, 2 usage or validation
//! error, 3 resource cap.

pub mod bound;
pub mod output;
pub mod report;
pub mod simulate;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "KTRACE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ktrace_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ktrace_core::Error::Resource { .. }) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ktrace", version, about = "k-trace certification suites, concentration bounds and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run property suites on seeded random instances.
    Verify(VerifyArgs),
    /// Evaluate master, Chernoff and subspace bounds for an ensemble file.
    Bound(BoundArgs),
    /// Monte Carlo statistics of top-k and bottom-k eigenvalue sums.
    Simulate(SimulateArgs),
    /// Tabulate bounds against ground truth from `bound` and `simulate` outputs.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Tolerance applied to every check instead of the suite defaults.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long = "theta-min")]
    pub theta_min: Option<f64>,
    #[arg(long = "theta-max")]
    pub theta_max: Option<f64>,
    #[arg(long = "theta-points")]
    pub theta_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Ensemble JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output directory for per-k reports and curve CSVs.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize])]
    pub k: Vec<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Relative deviation for tail bounds.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize])]
    pub k: Vec<usize>,
    /// Tail thresholds, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding `bounds.json` and optionally `stats.json`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "md")]
    pub format: FormatArg,
}

/// Worker count from `KTRACE_THREADS`, if set.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs a parsed command, returning the exit code.
pub fn run(cli: Cli) -> CliResult<i32> {
    let threads = threads_from_env()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Verify(a) => verify::run(&a),
        Command::Bound(a) => bound::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Report(a) => report::run(&a),
    })
}

/// Parses `args`, runs, prints errors to stderr, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
