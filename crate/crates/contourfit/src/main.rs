use clap::Parser;

fn main() {
    let args = contourfit::cli::Args::parse();
    std::process::exit(contourfit::cli::run(&args));
}
