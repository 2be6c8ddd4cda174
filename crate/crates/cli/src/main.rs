//! `polya`: equalization probability of the Pólya urn from the command line.
//!
//! Data goes to stdout (or `--output`), diagnostics and notes to stderr.
//! Exit status: 0 on success, 1 on a computation error or failed check,
//! 2 on a usage error.

mod commands;
mod record;

use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use record::{Format, Method};

/// Environment variable overriding the DP memory budget, in bytes.
pub const DP_BUDGET_ENV: &str = "POLYA_DP_MEMORY_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "polya",
    version,
    about = "Pólya urn equalization probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct UrnArgs {
    /// Initial black balls
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub b: u64,
    /// Initial white balls
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub w: u64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write data here instead of stdout
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of independent RNG blocks the samples are split into
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub streams: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactForm {
    Theorem,
    Binomial,
    Complement,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMethod {
    Direct,
    Definetti,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApproxMethod {
    Normal,
    Chernoff,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact equalization probability from the closed forms
    Exact {
        #[command(flatten)]
        urn: UrnArgs,
        #[arg(long, value_enum, default_value_t = ExactForm::Theorem)]
        form: ExactForm,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact truncated first-passage probability by dynamic programming
    Dp {
        #[command(flatten)]
        urn: UrnArgs,
        /// Level of B - W to reach (0 = equalization)
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        target: i64,
        #[arg(long, default_value_t = 200)]
        horizon: u64,
        /// Emit P(tau = n) for every n as CSV instead of the summary record
        #[arg(long)]
        emit_pmf: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate
    Simulate {
        #[command(flatten)]
        urn: UrnArgs,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        target: i64,
        #[arg(long, default_value_t = 200)]
        horizon: u64,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, value_enum, default_value_t = SimMethod::Direct)]
        method: SimMethod,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normal approximation and Chernoff bound, compared with the exact value
    Approx {
        #[command(flatten)]
        urn: UrnArgs,
        #[arg(long, value_enum, default_value_t = ApproxMethod::All)]
        method: ApproxMethod,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate methods over ranges of (b, w); rows with w >= b are skipped
    Sweep {
        /// Inclusive range `lo..hi` (or a single value)
        #[arg(long, value_parser = parse_range)]
        b_range: RangeArg,
        #[arg(long, value_parser = parse_range)]
        w_range: RangeArg,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "exact")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        target: i64,
        #[arg(long, default_value_t = 200)]
        horizon: u64,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check that the three closed forms agree for every 1 <= w < b, b + w <= max-total
    IdentityCheck {
        #[arg(long, default_value_t = 120, value_parser = clap::value_parser!(u64).range(3..))]
        max_total: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeArg {
    pub lo: u64,
    pub hi: u64,
}

fn parse_range(s: &str) -> Result<RangeArg, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|e| format!("bad bound {t:?}: {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("range {s:?} must satisfy 1 <= lo <= hi"));
    }
    Ok(RangeArg { lo, hi })
}

/// Failure of a subcommand, mapped onto the exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<polya_core::Error> for CliError {
    fn from(e: polya_core::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(format!("CSV error: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("I/O error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exact { urn, form, out } => commands::exact(&urn, form, &out),
        Command::Dp {
            urn,
            target,
            horizon,
            emit_pmf,
            out,
        } => commands::dp(&urn, target, horizon, emit_pmf, &out),
        Command::Simulate {
            urn,
            target,
            horizon,
            mc,
            method,
            out,
        } => commands::simulate(&urn, target, horizon, &mc, method, &out),
        Command::Approx { urn, method, out } => commands::approx(&urn, method, &out),
        Command::Sweep {
            b_range,
            w_range,
            methods,
            target,
            horizon,
            mc,
            out,
        } => commands::sweep(b_range, w_range, &methods, target, horizon, &mc, &out),
        Command::IdentityCheck { max_total } => commands::identity_check(max_total),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
