//! Command-line driver for the epiphase library: seeded verification
//! suites, deterministic enumerations, and operator-to-R-function
//! decomposition.
//!
//! Exit codes: 0 on success, 1 when a verification check exceeds its
//! tolerance, 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod decompose;
mod enumerate;
mod render;
mod schema;
mod verify;

use config::CommonArgs;
use enumerate::EnumerateTarget;

#[derive(Parser)]
#[command(
    name = "epiphase",
    version,
    about = "Epistemically restricted phase-space decompositions of prime-dimensional quantum systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded randomized verification suites
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List subgroups, coherent frameworks, or the qubit transformation sets
    Enumerate {
        #[command(flatten)]
        common: CommonArgs,
        /// What to enumerate
        #[arg(long, value_enum)]
        what: EnumerateTarget,
        /// Transformation-chain length for framework listings
        #[arg(long, default_value_t = 1)]
        chain_len: usize,
    },
    /// Decompose operator data from a JSON file into R-function tables
    Decompose {
        #[command(flatten)]
        common: CommonArgs,
        /// Input JSON file with density / channels / POVM element
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Emit the complete d = 2 classification: the twelve
    /// inversion-compatible rotations and the 24-element permutation group
    ClassifyQubit {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify { common } => {
            let config = common.resolve(2)?;
            let pass = verify::run(&config)?;
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Enumerate { common, what, chain_len } => {
            let config = common.resolve(2)?;
            enumerate::run(&config, what, chain_len)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { common, input } => {
            let config = common.resolve(2)?;
            decompose::run(&config, &input)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ClassifyQubit { common } => {
            let config = common.resolve(2)?;
            enumerate::classify_qubit(&config)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
