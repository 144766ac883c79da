//! `semchan` command-line front end.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semchan::Error;

#[derive(Debug, Parser)]
#[command(
    name = "semchan",
    version,
    about = "Semantic channel analysis for ground Datalog knowledge bases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Cap on the grounded atom universe of a knowledge base.
    #[arg(long, env = "SEMCHAN_GUARD", global = true, hide = true)]
    pub guard: Option<u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irredundant core, shortcuts and depth strata of one KB.
    Analyze {
        #[arg(long)]
        kb: PathBuf,
    },
    /// Overlap decomposition between a sender and each receiver.
    Overlap(PairArgs),
    /// Every invariant of each sender/receiver channel.
    Invariants(ChannelArgs),
    /// Shannon capacity of the carrier.
    Capacity {
        #[arg(long)]
        channel: Option<PathBuf>,
        #[arg(long, default_value_t = semchan::info::DEFAULT_TOL)]
        tol: f64,
    },
    /// Monte Carlo run of the two-layer code.
    Simulate(SimulateArgs),
    /// Reproduce the bundled example's tables and check them.
    Example,
    /// Broadcast feasibility for one sender and several receivers.
    Broadcast(ChannelArgs),
    /// Distortion matrix between sender and receiver states.
    Distortion(DistortionArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Sender KB file.
    #[arg(long)]
    pub kb: PathBuf,
    /// Receiver KB file (repeatable).
    #[arg(long = "receiver", required = true)]
    pub receivers: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Channel config (JSON). Defaults to the bundled 10-ary symmetric carrier.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long, default_value_t = semchan::info::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chan: ChannelArgs,
    /// Blocklengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Hamming,
    Closure,
    Depth,
    Composite,
}

#[derive(Debug, Args)]
pub struct DistortionArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = KindArg::Closure)]
    pub kind: KindArg,
    /// Composite weights `alpha,beta,gamma`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
    pub weights: Vec<f64>,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_GUARD: u8 = 3;
pub const EXIT_GOLDEN: u8 = 4;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::RangeRestriction { .. } | Error::Json(_) | Error::Config(_) => EXIT_PARSE,
            Error::GuardExceeded { .. } => EXIT_GUARD,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
