use std::process::ExitCode;

fn main() -> ExitCode {
    semlex::cli::main()
}
