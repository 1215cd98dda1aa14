use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match rmrpa::cli::run(std::env::args_os(), &mut out) {
        Ok(()) => {
            let _ = out.flush();
            ExitCode::SUCCESS
        }
        Err(diagnostic) => {
            let _ = out.flush();
            eprintln!("{diagnostic}");
            ExitCode::from(2)
        }
    }
}
