use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = cst_cli::run(std::env::args_os());
    for d in &result.diagnostics {
        eprintln!("{d}");
    }
    let text = serde_json::to_string_pretty(&result.payload).expect("JSON values serialize");
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        return ExitCode::FAILURE;
    }
    ExitCode::from(result.exit_code as u8)
}
