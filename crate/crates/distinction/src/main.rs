use clap::Parser;
use distinction::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
