use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tropabel::cli::{run, BundleOp, Command, NaOp, Options, RepOp};
use tropabel::scenario::Scenario;
use tropabel::Error;

#[derive(Parser)]
#[command(name = "tropabel", version, about = "Tropical and non-Archimedean bundle calculus")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lattices, pairings and admissible sublattices of a Néron–Severi class.
    NsAnalyze(Common),
    /// Operations on tropical vector bundles.
    Bundle {
        #[arg(value_enum)]
        op: BundleOp,
        #[command(flatten)]
        common: Common,
    },
    /// Tropical representations and their decompositions.
    Rep {
        #[arg(value_enum)]
        op: RepOp,
        #[command(flatten)]
        common: Common,
    },
    /// Tropicalization of analytic line bundles and representations.
    Na {
        #[arg(value_enum)]
        op: NaOp,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Seed for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximal group order for subgroup enumeration.
    #[arg(long)]
    bound: Option<u64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(command: Command, common: &Common) -> Result<String, Error> {
    let text = std::fs::read_to_string(&common.scenario).map_err(|e| Error::Validation {
        path: common.scenario.display().to_string(),
        message: e.to_string(),
    })?;
    let scenario = Scenario::from_json(&text)?;
    let options = Options {
        seed: common.seed,
        bound: common.bound,
    };
    run(command, &scenario, options)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match &cli.command {
        Cmd::NsAnalyze(c) => (Command::NsAnalyze, c),
        Cmd::Bundle { op, common } => (Command::Bundle(*op), common),
        Cmd::Rep { op, common } => (Command::Rep(*op), common),
        Cmd::Na { op, common } => (Command::Na(*op), common),
    };
    let output = match execute(command, common) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{output}"),
    }
    ExitCode::SUCCESS
}
