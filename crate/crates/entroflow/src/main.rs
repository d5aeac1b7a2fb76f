//! `entroflow` — batch experiments on information conservation and
//! entropy growth in small quantum and classical systems.
//!
//! Exit codes: 0 when every checked property held, 1 when a run completed
//! but violated one, 2 for configuration, usage, or I/O problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entroflow::commands::{
    cmd_classical, cmd_conserve, cmd_cycle, cmd_lemmas, max_dim_from_env, Outcome, RunContext,
};

#[derive(Parser)]
#[command(
    name = "entroflow",
    version,
    about = "Entropy growth and information conservation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized sweeps of the four classical entropy inequalities
    Lemmas(RunArgs),
    /// The evolve-measure cycle experiment on a partitioned quantum system
    Cycle(RunArgs),
    /// A doubly stochastic chain on a classical distribution
    Classical(RunArgs),
    /// Information conservation under random unitary evolution
    Conserve(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (one [section] per command)
    #[arg(long)]
    config: PathBuf,

    /// Master seed, overriding the config's `seed` key
    #[arg(long)]
    seed: Option<u64>,

    /// Directory the CSV, summary, and manifest files land in
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args, run): (_, _, fn(&RunContext) -> entroflow::Result<Outcome>) =
        match &cli.command {
            Command::Lemmas(a) => ("lemmas", a, cmd_lemmas),
            Command::Cycle(a) => ("cycle", a, cmd_cycle),
            Command::Classical(a) => ("classical", a, cmd_classical),
            Command::Conserve(a) => ("conserve", a, cmd_conserve),
        };
    let max_dim = match max_dim_from_env() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("entroflow: {e}");
            return ExitCode::from(2);
        }
    };
    let ctx = RunContext {
        config_path: args.config.clone(),
        out_dir: args.out.clone(),
        seed_flag: args.seed,
        max_dim,
    };
    match run(&ctx) {
        Ok(Outcome::Pass) => {
            println!("{name}: pass ({})", ctx.out_dir.display());
            ExitCode::SUCCESS
        }
        Ok(Outcome::Violation) => {
            eprintln!("{name}: property violation (outputs in {})", ctx.out_dir.display());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("entroflow: {e}");
            ExitCode::from(2)
        }
    }
}
