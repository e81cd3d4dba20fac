use std::process::ExitCode;

fn main() -> ExitCode {
    wstate_forge::cli::run()
}
