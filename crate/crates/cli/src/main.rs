use std::path::PathBuf;
use std::process::ExitCode;

use aeris::commands::{Command, Overrides};
use clap::Parser;

/// Analytical model, Monte-Carlo oracle and optimizers for UAV/IRS relaying.
#[derive(Debug, Parser)]
#[command(name = "aeris", version)]
struct Args {
    command: Command,
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for `<command>.csv` and `<command>.json`.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Monte-Carlo trials, overriding `[sim].trials`.
    #[arg(long)]
    trials: Option<u64>,
    /// Monte-Carlo seed, overriding `[sim].seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep axis `var=lo:hi:step`; repeat for a Cartesian grid. Replaces the
    /// file's `[[sweep]]` tables.
    #[arg(long)]
    grid: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        trials: args.trials,
        seed: args.seed,
        grid: args.grid,
    };
    match aeris::run(args.command, &args.scenario, &args.out, &overrides) {
        Ok(outcome) => {
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            if outcome.failures > 0 {
                eprintln!("{} check(s) outside tolerance", outcome.failures);
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("aeris: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
