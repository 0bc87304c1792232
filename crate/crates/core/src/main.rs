use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use smoothamb::cli::{execute, ExperimentKind, Outcome, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Optimal investment under smooth ambiguity about the stock drift.
///
/// Without --config the builtin base parameter set is used, so every
/// subcommand runs out of the box. Exit codes: 0 success, 1 invalid
/// config or arguments, 2 numerical failure, 3 verification failure.
#[derive(Parser)]
#[command(name = "smoothamb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to a JSON experiment config; builtin defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Gauss-Hermite node count
    #[arg(long)]
    gh_nodes: Option<usize>,
    /// Override the output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the base instance and write solve.json
    Solve(CommonArgs),
    /// Trace the weighted expected-utility frontier for a two-drift prior
    Frontier(CommonArgs),
    /// Locate the fixed-point weights that attain the ambiguity value
    FixedPoint(CommonArgs),
    /// Compare ambiguity-adjusted and ambiguity-neutral quantities
    Compare(CommonArgs),
    /// Sweep one parameter and record the initial strategy
    Sweep(CommonArgs),
    /// Run the internal consistency checks and write verify.json
    Verify(CommonArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, CommonArgs) {
        match self {
            Command::Solve(a) => (ExperimentKind::Solve, a),
            Command::Frontier(a) => (ExperimentKind::Frontier, a),
            Command::FixedPoint(a) => (ExperimentKind::FixedPoint, a),
            Command::Compare(a) => (ExperimentKind::Compare, a),
            Command::Sweep(a) => (ExperimentKind::Sweep, a),
            Command::Verify(a) => (ExperimentKind::Verify, a),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap's rendering includes the trailing newline
            e.print().expect("writing to the standard streams");
            return ExitCode::from(code);
        }
    };
    let (kind, args) = cli.command.split();
    let overrides = Overrides { seed: args.seed, gh_nodes: args.gh_nodes, out: args.out };
    match execute(kind, args.config.as_deref(), &overrides) {
        Ok(Outcome::Completed) => ExitCode::from(0),
        Ok(Outcome::ChecksFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
