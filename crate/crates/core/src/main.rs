use clap::Parser;

use ginisim::cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = cli.run() {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}
