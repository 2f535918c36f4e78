use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hindsight_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(o.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(hindsight_cli::EXIT_USAGE);
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
