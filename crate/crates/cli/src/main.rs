use clap::Parser;

fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(billiard_cli::run(billiard_cli::Cli::parse()))
}
