use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = |k: &str| std::env::var(k).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = pgonal::cli::run(std::env::args_os(), &env, &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
