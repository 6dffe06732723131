use clap::Parser;

fn main() {
    let cli = bcg_cli::Cli::parse();
    if let Err(e) = bcg_cli::run(cli) {
        eprintln!("bcg: {e}");
        std::process::exit(e.exit_code());
    }
}
