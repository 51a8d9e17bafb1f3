use clap::Parser;

fn main() {
    let cli = isrs_gn_cli::Cli::parse();
    if let Err(e) = isrs_gn_cli::run_cli(cli) {
        eprintln!(
            "{}",
            serde_json::json!({ "error": e.to_string(), "kind": e.kind() })
        );
        std::process::exit(1);
    }
}
