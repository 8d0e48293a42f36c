use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::Parser;
use petit_core::engine::INVALID_STRATEGY_MESSAGE;
use petit_core::{load_spec_file, render_report, test_specification, HttpTransport, OrderStrategy, TestOptions};

/// Tests a REST service against the contracts of its annotated OpenAPI
/// document.
#[derive(Parser, Debug)]
#[command(name = "petit", version)]
struct Args {
    /// OpenAPI document (JSON) with x-requires, x-ensures and x-invariants.
    spec: PathBuf,
    /// Operation order: a permutation of C, M and O (e.g. CMO), or RND.
    strategy: String,
    /// Verbose output, printing at most MAX resources of each response.
    #[arg(short = 'v', long = "verbose", value_name = "MAX")]
    verbose: Option<usize>,
    /// Test the APIs in random order.
    #[arg(short = 'r', long = "random")]
    random: bool,
    /// Seed for data generation and shuffling.
    #[arg(long)]
    seed: Option<u64>,
    /// Keep document order inside each operation category.
    #[arg(long)]
    stable_order: bool,
    /// HTTP timeout in seconds.
    #[arg(long, default_value_t = 10)]
    timeout: u64,
}

const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let args = Args::parse();
    let Ok(strategy) = args.strategy.parse::<OrderStrategy>() else {
        eprintln!("{INVALID_STRATEGY_MESSAGE}");
        return ExitCode::from(EXIT_USAGE);
    };
    match run(&args, strategy) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(args: &Args, strategy: OrderStrategy) -> anyhow::Result<ExitCode> {
    let spec = load_spec_file(&args.spec).with_context(|| format!("cannot load {}", args.spec.display()))?;
    let transport = HttpTransport::with_timeout(Duration::from_secs(args.timeout)).context("cannot build HTTP client")?;
    let options = TestOptions { randomize_apis: args.random, seed: args.seed, stable_order: args.stable_order };
    if let Some(max) = args.verbose {
        println!(">>> Maximum resources to be printed: {max}");
    }
    let run = test_specification(&spec, strategy, &options, &transport);
    print!("{}", render_report(&run, args.verbose.is_some(), args.verbose.unwrap_or(0)));
    Ok(if run.not_ok() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
