//! `ccpt` command-line tool.

mod commands;
mod report;
mod signal_io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<ccpt::Error> for CliError {
    fn from(e: ccpt::Error) -> Self {
        use ccpt::Error::*;
        match e {
            InvalidPeriodSet(_)
            | InvalidSubspaceIndex { .. }
            | NotADivisor { .. }
            | UnsupportedLength(_)
            | LengthMismatch { .. }
            | InvalidRange(_)
            | UnknownMethod(_) => CliError::Usage(e.to_string()),
            FactorizationUnsupported(_)
            | IllConditioned { .. }
            | NoPeriodicContent
            | Overflow(_)
            | Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "ccpt", version, about = "Conjugate-pair periodic transform toolkit")]
struct Cli {
    /// Significance threshold as a fraction of the strongest period.
    #[arg(
        long,
        global = true,
        env = "CCPT_THRESHOLD",
        default_value_t = ccpt::ThresholdPolicy::DEFAULT_FRACTION,
        value_parser = parse_threshold
    )]
    threshold: f64,

    #[command(subcommand)]
    command: Command,
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("threshold must be in (0, 1], got {v}"))
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected P,K, got {s:?}"))?;
    let p = a.trim().parse().map_err(|_| format!("bad period {a:?}"))?;
    let k = b.trim().parse().map_err(|_| format!("bad index {b:?}"))?;
    Ok((p, k))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Preset {
    Y1,
    Y2,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
pub enum AnalyzeMethod {
    Ccpt,
    Rpt,
    Dft,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
pub enum DictBasis {
    Ccpt,
    Farey,
    Rpt,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
pub enum BasisFamily {
    Ccpt,
    Rpt,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a signal as CSV plus a JSON metadata sidecar.
    #[command(group(ArgGroup::new("source").required(true).args(["preset", "tiled_ccps", "spec"])))]
    Gen {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        /// Seed for the y2 preset.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// A pair sum `P,K` repeated to `--len` samples.
        #[arg(long, value_parser = parse_pair, requires = "len")]
        tiled_ccps: Option<(usize, usize)>,
        #[arg(long)]
        len: Option<usize>,
        /// JSON signal spec file.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output CSV; the sidecar goes to `<output>.json`. Stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Full-length transform, divisor strengths and period estimate.
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "ccpt")]
        method: AnalyzeMethod,
        /// Frequency scale for labels (default: the signal length).
        #[arg(long)]
        frame: Option<f64>,
        /// CSV of index, label, frequency, magnitude.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// JSON report path; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Analyze every prefix length from N1 to the full length.
    Scan {
        input: PathBuf,
        #[arg(long)]
        n1: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// CSV of length and detected periods.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Penalized minimum-norm dictionary fit over periods 1..=pmax.
    Dict {
        input: PathBuf,
        /// Largest period in the dictionary (default: 0.8 N).
        #[arg(long)]
        pmax: Option<usize>,
        #[arg(long, value_enum, default_value = "ccpt")]
        basis: DictBasis,
        /// Penalty `p^e` per period.
        #[arg(long, default_value_t = 2.0)]
        penalty_exp: f64,
        #[arg(long)]
        frame: Option<f64>,
        /// CSV of period, raw strength, normalized strength.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Capabilities, multiplication counts and timings of each method.
    Compare {
        input: PathBuf,
        /// Add the range-scan row starting at this length.
        #[arg(long)]
        n1: Option<usize>,
        /// Add the dictionary rows.
        #[arg(long)]
        dict: bool,
        #[arg(long)]
        pmax: Option<usize>,
        /// JSON report path.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dump T_N, or one period block of it, as CSV.
    Basis {
        n: usize,
        #[arg(long)]
        block: Option<usize>,
        #[arg(long, value_enum, default_value = "ccpt")]
        kind: BasisFamily,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let policy = ccpt::ThresholdPolicy::relative(cli.threshold);
    match cli.command {
        Command::Gen {
            preset,
            seed,
            tiled_ccps,
            len,
            spec,
            output,
        } => commands::gen(preset, seed, tiled_ccps, len, spec.as_deref(), output.as_deref()),
        Command::Analyze {
            input,
            method,
            frame,
            plot,
            output,
        } => commands::analyze(&input, method, frame, policy, plot.as_deref(), output.as_deref()),
        Command::Scan {
            input,
            n1,
            jobs,
            csv,
            output,
        } => commands::scan(&input, n1, jobs, policy, csv.as_deref(), output.as_deref()),
        Command::Dict {
            input,
            pmax,
            basis,
            penalty_exp,
            frame,
            plot,
            output,
        } => commands::dict(
            &input,
            commands::DictArgs {
                p_max: pmax,
                basis,
                penalty_exp,
                frame,
            },
            policy,
            plot.as_deref(),
            output.as_deref(),
        ),
        Command::Compare {
            input,
            n1,
            dict,
            pmax,
            output,
        } => commands::compare(&input, n1, dict, pmax, policy, output.as_deref()),
        Command::Basis {
            n,
            block,
            kind,
            output,
        } => commands::basis(n, block, kind, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ccpt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
