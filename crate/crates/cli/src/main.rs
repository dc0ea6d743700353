use clap::Parser;
use vortex_images_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
