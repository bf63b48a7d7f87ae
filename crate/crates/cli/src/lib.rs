//! Command-line front ends `lmg` and `bcs` over `pairon-core`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};

pub mod bcs;
pub mod config;
mod error;
pub mod lmg;
pub mod output;

pub use config::Format;
pub use error::{CliError, CliResult};
pub use output::Table;

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the table here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to PAIRON_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML file with default values for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn meta(tool: &str, command: &str, config: Value, seed: u64) -> Value {
    json!({
        "tool": tool,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "seed": seed,
    })
}

fn emit(
    table: &Table,
    format: Format,
    meta: Value,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write(format, meta, &mut f)?;
            f.flush()?;
        }
        None => table.write(format, meta, stdout)?,
    }
    Ok(())
}

/// Runs a binary's `main`, printing errors to stderr and mapping them to the
/// process exit code.
pub fn main_with(
    run: fn(Vec<std::ffi::OsString>, &mut dyn Write, &mut dyn Write) -> CliResult<()>,
) -> std::process::ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    match run(std::env::args_os().collect(), &mut out, &mut err) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let code = e.exit_code() as u8;
            let _ = e.print();
            std::process::ExitCode::from(code)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            std::process::ExitCode::from(e.exit_code())
        }
    }
}
