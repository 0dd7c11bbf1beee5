use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use orthoplate_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if e.code == 1 {
                let _ = std::io::stdout().write_all(e.message.as_bytes());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code)
        }
    }
}
