use clap::Parser;

use infocorr::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("infocorr: {e}");
        std::process::exit(e.exit_code());
    }
}
