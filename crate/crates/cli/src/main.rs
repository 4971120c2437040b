//! `cqwalk` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid flags, 3 numerical
//! invariant violated (norm drift, failed recovery).

mod commands;
mod output;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "cqwalk", version, about = "Quantum walk with an exactly binomial position distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wave function and position distribution after a number of steps.
    Evolve(EvolveArgs),
    /// Coin–position entanglement entropy for t = 1..=t-max.
    Entropy(EntropyArgs),
    /// Monte Carlo ensemble with random position measurements.
    Decohere(DecohereArgs),
    /// Chirality measurement followed by the recovery protocol.
    RecoverDemo(RecoverArgs),
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EvolveArgs {
    /// Right-step probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Number of steps.
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Last time step.
    #[arg(long)]
    pub t_max: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct DecohereArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Comma-separated measurement probabilities per step.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    /// Time horizon.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Master seed of the per-trial random streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Accumulate each trajectory's exact final distribution instead of a sample.
    #[arg(long)]
    pub exact: bool,
    /// Worker threads (0 = one per core). Output does not depend on this.
    #[arg(long, env = "CQWALK_THREADS", default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct RecoverArgs {
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Time of the chirality measurement.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Io(io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "invalid arguments: {msg}"),
            Failure::Numerical(msg) => write!(f, "numerical invariant violated: {msg}"),
            Failure::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::Io(err)
    }
}

impl From<cqwalk::WalkError> for Failure {
    fn from(err: cqwalk::WalkError) -> Self {
        Failure::Usage(err.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<C: Serialize>(
    table: &output::Table,
    out: &OutputArgs,
    command: &str,
    config: &C,
) -> Result<(), Failure> {
    let mut sink = open_output(&out.output)?;
    table.write(&mut sink, out.format, command, config)?;
    sink.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Evolve(args) => {
            let table = commands::evolve(&args)?;
            emit(&table, &args.out, "evolve", &args)
        }
        Command::Entropy(args) => {
            let table = commands::entropy(&args)?;
            emit(&table, &args.out, "entropy", &args)
        }
        Command::Decohere(args) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(args.threads)
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let table = pool.install(|| commands::decohere(&args))?;
            emit(&table, &args.out, "decohere", &args)
        }
        Command::RecoverDemo(args) => {
            let table = commands::recover_demo(&args)?;
            emit(&table, &args.out, "recover-demo", &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("cqwalk: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
