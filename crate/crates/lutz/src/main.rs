use clap::Parser;

fn main() {
    let cli = lutz::cli::Cli::parse();
    std::process::exit(lutz::cli::run(cli));
}
