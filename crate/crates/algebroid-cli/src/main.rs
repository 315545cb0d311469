//! Command line front end for the check registry: run a scenario file and
//! print its report, validate a scenario without running it, or list the
//! registered checks.
//!
//! Exit codes: 0 when every check passes, 1 when at least one check fails,
//! 2 for configuration problems (unreadable or malformed scenarios,
//! unknown check names, unmet requirements, degree-cap overflows).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use algebroid::checks::registry;
use algebroid::runner::{render_json, render_text, resolve_checks, run_scenario, RunConfig};
use algebroid::scenario::{Instance, Scenario};

#[derive(Parser)]
#[command(name = "algebroid", version, about = "Exact identity checks for transitive Lie algebroids and matrix geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check a scenario lists and print the report.
    Run(RunArgs),
    /// Build a scenario and resolve its checks without running them.
    Validate {
        /// Scenario file (TOML).
        scenario: PathBuf,
    },
    /// List every registered check and the statement it verifies.
    ListChecks,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Override the scenario's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's per-check sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the scenario's degree cap; 0 lifts the cap entirely.
    #[arg(long)]
    degree_cap: Option<u32>,
    /// Worker threads: 1 forces a sequential run, 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the report as JSON.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Print the report as plain text (the default).
    #[arg(long)]
    text: bool,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> algebroid::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { scenario } => validate(&scenario),
        Command::ListChecks => {
            for def in registry() {
                println!("{}: {}", def.name, def.statement);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(args: RunArgs) -> algebroid::Result<ExitCode> {
    let scenario = Scenario::from_path(&args.scenario)?;
    let config = RunConfig {
        seed: args.seed,
        samples: args.samples,
        degree_cap: args.degree_cap,
        jobs: args.jobs,
    };
    let report = run_scenario(&scenario, &config)?;
    let rendered = if args.json {
        render_json(&report)
    } else {
        render_text(&report)
    };
    print!("{rendered}");
    for check in &report.checks {
        eprintln!("# {:>8} \u{00b5}s  {}", check.elapsed_micros, check.name);
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn validate(path: &PathBuf) -> algebroid::Result<ExitCode> {
    let scenario = Scenario::from_path(path)?;
    let inst = Instance::build(&scenario)?;
    let defs = resolve_checks(&scenario, &inst)?;
    println!(
        "scenario {:?}: base dim {}, kernel dim {}, {} checks resolved",
        inst.name,
        inst.d,
        inst.algebra.dim,
        defs.len()
    );
    Ok(ExitCode::SUCCESS)
}
