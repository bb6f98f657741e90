use std::io;
use std::process::ExitCode;

use aplab_cli::{parse_threads, run_with_args, THREADS_VAR};

fn main() -> ExitCode {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(raw) => match parse_threads(&raw) {
            Ok(n) => n,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
        },
        Err(_) => None,
    };
    let code = run_with_args(
        std::env::args_os(),
        threads,
        &mut io::stdout(),
        &mut io::stderr(),
    );
    ExitCode::from(code as u8)
}
