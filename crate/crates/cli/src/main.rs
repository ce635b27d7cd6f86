use clap::Parser;

fn main() {
    std::process::exit(wtp_cli::run(wtp_cli::Cli::parse()));
}
