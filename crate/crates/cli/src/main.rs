use std::process::ExitCode;

use clap::Parser;
use maxcont_cli::commands::output_path;
use maxcont_cli::output::emit;
use maxcont_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(output_path(&cli), &out.text)?;
        Ok(out.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
