use std::io::Write;
use std::process::ExitCode;

use mazur_floer::cli::{run, thread_count, EXIT_INPUT, THREADS_VAR};

fn main() -> ExitCode {
    let var = std::env::var(THREADS_VAR).ok();
    match thread_count(var.as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    let out = run(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
