use std::process::ExitCode;

use clap::Parser;
use nfs_sieve::cli::{self, RunConfig};

fn main() -> ExitCode {
    let code = match RunConfig::parse().resolve().and_then(|c| cli::run(&c, &mut std::io::stdout())) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            cli::error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
