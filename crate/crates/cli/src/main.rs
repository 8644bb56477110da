use std::process::ExitCode;

use clap::Parser;
use smx_cli::{exit_code, run, Cli};

fn thread_count() -> Result<usize, String> {
    match std::env::var("SMX_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("SMX_THREADS must be a non-negative integer, got '{v}'")),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = match thread_count() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: cannot start worker pool: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
