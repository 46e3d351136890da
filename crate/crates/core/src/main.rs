use clap::Parser;
use riemann_factor::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(Cli::parse()));
}
