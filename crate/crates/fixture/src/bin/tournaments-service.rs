use std::process::ExitCode;

use clap::Parser;
use petit_fixture::{spec_with_base_url, Fault, FaultFlags, FixtureServer};

/// Runs the tournaments service on a loopback port.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Enable a fault; repeatable.
    #[arg(long = "fault", value_name = "NAME")]
    faults: Vec<Fault>,
    /// Print the specification document pointing at this server and exit.
    #[arg(long)]
    print_spec: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.print_spec {
        println!("{}", spec_with_base_url(&format!("http://127.0.0.1:{}", args.port)));
        return ExitCode::SUCCESS;
    }
    let flags: FaultFlags = args.faults.iter().copied().collect();
    let server = match FixtureServer::start(args.port, flags) {
        Ok(server) => server,
        Err(e) => {
            eprintln!("cannot start server on port {}: {e}", args.port);
            return ExitCode::from(2);
        }
    };
    eprintln!("tournaments service listening on {}", server.base_url());
    for fault in &args.faults {
        eprintln!("  fault enabled: {fault}");
    }
    match server.wait() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("server error: {e}");
            ExitCode::FAILURE
        }
    }
}
