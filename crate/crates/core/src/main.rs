use clap::Parser;

fn main() -> std::process::ExitCode {
    rollctl::cli::run(rollctl::cli::Cli::parse())
}
