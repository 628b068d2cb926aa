use clap::Parser;

fn main() -> std::process::ExitCode {
    let cli = conebvp::cli::Cli::parse();
    std::process::ExitCode::from(conebvp::cli::execute(cli))
}
