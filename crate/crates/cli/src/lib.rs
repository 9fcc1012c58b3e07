//! Scenario-file front end for `aeris-core`: parses a strict, unit-annotated
//! TOML scenario, expands its sweep grid, runs one command over every grid
//! point and writes a CSV table plus a JSON record file.

pub mod commands;
pub mod error;
pub mod output;
pub mod quantity;
pub mod schema;
pub mod sweep;

use std::path::{Path, PathBuf};

use commands::{Command, Context, Overrides};
use error::{CliError, EXIT_TOLERANCE};
use output::{Document, Table};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: u8,
    pub files: Vec<PathBuf>,
    pub rows: usize,
    /// Failed checks of a `validate` run.
    pub failures: usize,
}

fn emit<T: Serialize>(
    ctx: &Context,
    command: Command,
    out: &Path,
    table: Table,
    records: &[T],
) -> Result<Vec<PathBuf>, CliError> {
    let simulated = matches!(command, Command::Simulate | Command::Validate);
    let doc = Document {
        tool: "aeris",
        version: output::VERSION,
        command: command.name(),
        schema_version: ctx.file.schema_version,
        seed: simulated.then_some(ctx.seed),
        trials: simulated.then_some(ctx.trials),
        axes: &ctx.axes,
        records,
    };
    Ok(output::write(out, command.name(), &table, &doc)?.to_vec())
}

/// Runs `command` on an already loaded context and writes its output files.
pub fn run_context(ctx: &Context, command: Command, out: &Path) -> Result<Outcome, CliError> {
    let (rows, files, failures) = match command {
        Command::Metrics => {
            let (t, r) = commands::metrics(ctx)?;
            (t.rows.len(), emit(ctx, command, out, t, &r)?, 0)
        }
        Command::Simulate => {
            let (t, r) = commands::simulate(ctx)?;
            (t.rows.len(), emit(ctx, command, out, t, &r)?, 0)
        }
        Command::Optimize => {
            let (t, r) = commands::optimize(ctx)?;
            (t.rows.len(), emit(ctx, command, out, t, &r)?, 0)
        }
        Command::Select => {
            let (t, r) = commands::select(ctx)?;
            (t.rows.len(), emit(ctx, command, out, t, &r)?, 0)
        }
        Command::Validate => {
            let (t, r) = commands::validate(ctx)?;
            let failures = r.iter().flat_map(|x| &x.checks).filter(|c| !c.pass).count();
            (t.rows.len(), emit(ctx, command, out, t, &r)?, failures)
        }
    };
    Ok(Outcome {
        exit_code: if failures > 0 { EXIT_TOLERANCE } else { 0 },
        files,
        rows,
        failures,
    })
}

/// Loads the scenario at `path` and runs `command`.
pub fn run(command: Command, path: &Path, out: &Path, overrides: &Overrides) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let ctx = Context::from_text(&text, overrides)?;
    run_context(&ctx, command, out)
}
