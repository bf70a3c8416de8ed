use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let result = rasch_doe_cli::run(&args, &mut lock, &mut std::io::stderr());
    let _ = lock.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(rasch_doe_cli::error::CliError::Args(text)) => {
            eprint!("{text}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
