use clap::Parser;

fn main() {
    let cli = powerburr_cli::args::Cli::parse();
    if let Err(e) = powerburr_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
