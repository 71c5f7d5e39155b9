//! `taildep` command-line tool.

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "taildep", version, about = "Classify tail dependence of bivariate heavy-tailed data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic sample from one of the built-in mixtures.
    Simulate {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        #[arg(long)]
        n: usize,
    },
    /// Strided log returns of a price column and their autocorrelations.
    Prep {
        /// Price column name (default: the last column).
        #[arg(long)]
        price_col: Option<String>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Estimate the angular support of the extremes.
    Support,
    /// Run the bootstrap dependence tests.
    Test {
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// Diamond plot coordinates and angle histogram of the k largest points.
    Diamond {
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Strong,
    Full,
    Weak,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Input CSV with a header row.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// RNG seed; falls back to TAILDEP_SEED, then 0.
    #[arg(long, global = true, env = "TAILDEP_SEED")]
    seed: Option<u64>,
    /// Number of upper order statistics (default: min(ceil(n/10), 100)).
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true, default_value_t = 1.0)]
    lambda: f64,
    /// Bootstrap resample size.
    #[arg(long, global = true)]
    mn: Option<usize>,
    /// Upper order statistics per resample.
    #[arg(long, global = true)]
    kmn: Option<usize>,
    /// Number of bootstrap resamples.
    #[arg(long = "B", global = true, default_value_t = 2000)]
    b: usize,
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha_sig: f64,
    /// Cone endpoints as `a,b`.
    #[arg(long, global = true, value_parser = parse_pair)]
    cone: Option<(f64, f64)>,
    /// Use absolute values of the two columns.
    #[arg(long, global = true, overrides_with = "no_abs")]
    abs: bool,
    #[arg(long, global = true, overrides_with = "abs")]
    no_abs: bool,
    /// Sample columns as `x,y` (default: the first two).
    #[arg(long, global = true, value_parser = parse_names)]
    cols: Option<(String, String)>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl Common {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// `--abs` / `--no-abs`, whichever came last, else `default`.
    pub fn abs_or(&self, default: bool) -> bool {
        if self.abs {
            true
        } else if self.no_abs {
            false
        } else {
            default
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn input(&self) -> Result<&PathBuf> {
        self.input.as_ref().context("--input is required for this command")
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected two numbers as a,b")?;
    let a = a.trim().parse::<f64>().map_err(|e| format!("bad number {a:?}: {e}"))?;
    let b = b.trim().parse::<f64>().map_err(|e| format!("bad number {b:?}: {e}"))?;
    Ok((a, b))
}

fn parse_names(s: &str) -> Result<(String, String), String> {
    let (x, y) = s.split_once(',').ok_or("expected two column names as x,y")?;
    Ok((x.trim().to_string(), y.trim().to_string()))
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    match cli.command {
        Command::Simulate { example, n } => commands::simulate(c, example, n),
        Command::Prep { ref price_col, stride } => commands::prep(c, price_col.as_deref(), stride),
        Command::Support => commands::support(c),
        Command::Test { which } => commands::test(c, which),
        Command::Diamond { bins } => commands::diamond(c, bins),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.common.threads {
        Some(0) => Err(anyhow::anyhow!("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("building worker pool")
            .and_then(|pool| pool.install(|| run(cli))),
        None => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("taildep: {e:#}");
            ExitCode::FAILURE
        }
    }
}

