use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(sheetrace_cli::run(std::env::args_os()))
}
