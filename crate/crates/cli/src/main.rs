use clap::Parser;
use marchenko_cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = marchenko_cli::run(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
