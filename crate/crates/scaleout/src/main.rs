use std::process::ExitCode;

fn main() -> ExitCode {
    scaleout::cli::main()
}
