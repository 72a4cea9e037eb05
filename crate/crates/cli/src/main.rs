//! `plcalc`: build model operators, evaluate norms and run seeded
//! equivalence experiments.

mod commands;
mod error;
mod io;
mod suite;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "plcalc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Input JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; `.json` or `.csv` (a directory for suites).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operator summaries.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Single norm values.
    Norm {
        #[command(subcommand)]
        action: NormAction,
    },
    /// Equivalence experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Pinned experiment suites.
    Suite {
        #[command(subcommand)]
        action: SuiteAction,
    },
}

#[derive(Debug, Subcommand)]
enum OpAction {
    Build,
}

#[derive(Debug, Subcommand)]
enum NormAction {
    Eval,
}

#[derive(Debug, Subcommand)]
enum ExperimentAction {
    Run,
}

#[derive(Debug, Subcommand)]
enum SuiteAction {
    Acceptance,
}

fn config(g: &Global) -> CliResult<&Path> {
    g.config
        .as_deref()
        .ok_or_else(|| CliError::Malformed("--config is required".into()))
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("PLCALC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Malformed(format!("PLCALC_THREADS={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Malformed(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let g = &cli.global;
    let out = g.out.as_deref();
    match cli.command {
        Command::Op { action: OpAction::Build } => commands::op_build(config(g)?, out),
        Command::Norm { action: NormAction::Eval } => commands::norm_eval(config(g)?, out, g.seed),
        Command::Experiment {
            action: ExperimentAction::Run,
        } => commands::experiment_run(config(g)?, out, g.seed, g.quiet),
        Command::Suite {
            action: SuiteAction::Acceptance,
        } => suite::acceptance(out, g.seed, g.quiet),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("plcalc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
