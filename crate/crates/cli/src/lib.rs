//! Command-line front end for `aplab-core`.
//!
//! The `aplab` binary is a thin wrapper around [`run_with_args`], which is
//! also what in-process callers use: output goes to the supplied sinks and
//! the thread count is an explicit argument instead of process state.

mod args;
mod commands;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{run, CliError};

/// Environment variable read by the binary to cap parallelism.
pub const THREADS_VAR: &str = "APLAB_THREADS";

/// Parses a thread setting: `0` means "let rayon decide" and maps to `None`.
pub fn parse_threads(raw: &str) -> Result<Option<usize>, String> {
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_VAR} must be a nonnegative integer, got {raw:?}"))?;
    Ok((n > 0).then_some(n))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on invalid input, 2 when a study finds
/// a contract violation.
///
/// With `threads = Some(n)` the command runs inside a dedicated pool of `n`
/// worker threads; otherwise rayon's global pool is used.
pub fn run_with_args<I, T>(
    args: I,
    threads: Option<usize>,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let result = match threads {
        None => run(cli.command, out, err),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(cli.command, out, err)),
            Err(e) => Err(CliError::Validation(e.to_string())),
        },
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
