use std::process::ExitCode;

use clap::Parser;

use gencoh::cli::{execute, output_path, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(output) => {
            let written = match output_path(&cli) {
                Some(path) => std::fs::write(path, &output.text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{}", output.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(output.code as u8),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
