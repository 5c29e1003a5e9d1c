use clap::Parser;

fn main() {
    let cli = rtbpa_cli::Cli::parse();
    if let Err(e) = rtbpa_cli::run(cli, &mut std::io::stdout()) {
        eprintln!("rtbpa: {e}");
        std::process::exit(e.exit_code());
    }
}
