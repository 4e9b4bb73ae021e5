use clap::Parser;

fn main() {
    let cli = ibsignal_cli::Cli::parse();
    if let Err(err) = ibsignal_cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(ibsignal_cli::exit_code(&err));
    }
}
