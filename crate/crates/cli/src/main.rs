use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rescon_cli::commands::{cmd_combine, cmd_run, cmd_verify, VerifyCheck};
use rescon_cli::scenario::SeedRange;
use rescon_cli::{tolerance, CliError, TOL_ENV};
use rescon_core::AgentId;

/// Byzantine-resilient consensus simulator and redundancy checker.
#[derive(Parser)]
#[command(name = "rescon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or `preset:NAME` for a built-in one.
    Run {
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Half-open range `A..B`, or a single seed.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<SeedRange>,
    },
    /// Check a graph file for r-robustness or the complete-core condition.
    Verify {
        graph: PathBuf,
        #[arg(long, conflicts_with = "corollary1", required_unless_present = "corollary1")]
        robust: Option<usize>,
        /// `N K F1,F2,...`: state dimension, Byzantine bound and core ids.
        #[arg(long, num_args = 3, value_names = ["N", "K", "F"])]
        corollary1: Option<Vec<String>>,
    },
    /// Compute one resilient convex combination from a states CSV.
    Combine {
        states: PathBuf,
        #[arg(long = "self")]
        self_id: usize,
        #[arg(long)]
        kappa: usize,
        /// Defaults to nκ + 2.
        #[arg(long)]
        sigma: Option<usize>,
        #[arg(long)]
        trace: bool,
    },
}

fn parse_seeds(s: &str) -> Result<SeedRange, String> {
    SeedRange::parse(s).map_err(|e| e.to_string())
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn corollary_args(args: &[String]) -> Result<VerifyCheck, CliError> {
    let usage = |what: &str| CliError::Usage(format!("--corollary1: bad {what}"));
    let n = args[0].parse().map_err(|_| usage("N"))?;
    let kappa_bar = args[1].parse().map_err(|_| usage("K"))?;
    let core = args[2]
        .split(',')
        .map(|t| t.trim().parse::<usize>().map(AgentId).map_err(|_| usage("core id list")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VerifyCheck::Corollary1 { n, kappa_bar, core })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        tolerance(std::env::var(TOL_ENV).ok().as_deref()).and_then(|tol| match cli.command {
            Command::Run { scenario, out, seeds } => {
                cmd_run(&scenario, out.as_deref(), seeds, tol).map(|s| (s, true))
            }
            Command::Verify { graph, robust, corollary1 } => {
                let check = match (robust, corollary1) {
                    (Some(r), _) => VerifyCheck::Robust(r),
                    (None, Some(args)) => corollary_args(&args)?,
                    (None, None) => unreachable!("clap requires one of the checks"),
                };
                cmd_verify(&read(&graph)?, &check)
            }
            Command::Combine { states, self_id, kappa, sigma, trace } => {
                cmd_combine(&read(&states)?, AgentId(self_id), kappa, sigma, trace, tol)
                    .map(|s| (s, true))
            }
        });
    match result {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("rescon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
