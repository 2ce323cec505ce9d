use std::process::ExitCode;

fn main() -> ExitCode {
    dyadic_scene::cli::run()
}
