//! `a2m`: command-line experiments on algebraic two-level measure trees.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "a2m", version, about = "Experiments on algebraic trees with two-level measures")]
pub struct Cli {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for Monte Carlo work. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub jobs: u32,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Number backend for exact outputs.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Rational)]
    pub mode: Mode,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Exact,
    Mc,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Smallest,
    Largest,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a tree or triangulation file; exits 1 listing violations.
    Validate { file: PathBuf },
    /// Decode a triangulation with an arc measure into its dual a2m tree.
    Decode { file: PathBuf },
    /// Encode a binary a2m tree as a triangulation, rooted at a leaf.
    Encode {
        file: PathBuf,
        #[arg(long)]
        root: u64,
        /// Which upper component comes first at each branch point.
        #[arg(long, value_enum, default_value_t = Order::Smallest)]
        order: Order,
    },
    /// Sample shape distribution of an a2m tree.
    ShapeDist {
        file: PathBuf,
        /// Samples per host, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Pairwise truncated sample shape distances.
    Ds {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        /// Index vectors kept per number of hosts.
        #[arg(long, default_value_t = 50)]
        budget: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = ProfileArg::Auto)]
        method: ProfileArg,
    },
    /// Nested Kingman coalescent experiments.
    Kingman {
        #[command(subcommand)]
        command: KingmanCommand,
    },
    /// Empirical branch point distribution error against its bound.
    BpdRate {
        /// a2m tree file; the intensity measure is sampled.
        #[arg(conflicts_with = "leaves")]
        file: Option<PathBuf>,
        /// Use a random binary tree with this many leaves, uniform on leaves.
        #[arg(long)]
        leaves: Option<usize>,
        /// Triples per trial, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "25,100,400")]
        p: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// List every triangulation of the convex n-gon.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=14))]
        n: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Sizes {
    /// Number of hosts; defaults to the length of --n.
    #[arg(long)]
    pub m: Option<usize>,
    /// Parasites per host: one value for all hosts or one per host.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_p: f64,
}

#[derive(Subcommand, Debug)]
pub enum KingmanCommand {
    /// Simulate one merger history and its tree.
    Sim {
        #[command(flatten)]
        sizes: Sizes,
    },
    /// Compare a restricted simulation with a direct one on rooted shapes.
    Consistency {
        #[command(flatten)]
        sizes: Sizes,
        /// Parasites per host of the restricted index set, first hosts first.
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Shape distance between consecutive coalescents of a growing schedule (CSV).
    Converge {
        /// Entries `MxN` (M hosts with N parasites each), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4x4,8x8,16x16")]
        schedule: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        gamma_h: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma_p: f64,
        #[arg(long, default_value_t = 2)]
        m_max: usize,
        #[arg(long, default_value_t = 6)]
        budget: usize,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Args(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{count} violation(s) found")]
    Violations { count: usize },
    #[error("test failed: {0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Args(_) => 2,
            CliError::Invalid(_) | CliError::Violations { .. } | CliError::Failed(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
