use std::path::PathBuf;
use std::process::ExitCode;

use bdies_cli::{configure_threads, load_config, run, write_outcome, CliError, Command};
use clap::Parser;

/// Boundary-domain integral equation solver for div(a grad u) = f in 2D.
///
/// The thread count can be set with the BDIES2D_THREADS environment variable.
#[derive(Parser)]
#[command(name = "bdies2d", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bdies2d: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    configure_threads()?;
    let cfg = load_config(&args.config, args.command)?;
    let dir = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let outcome = run(&cfg)?;
    write_outcome(&dir, &outcome)?;
    let results = &outcome.results;
    if let Some(checks) = results["checks"].as_array() {
        for c in checks {
            let mark = if c["pass"].as_bool() == Some(true) {
                "pass"
            } else {
                "FAIL"
            };
            println!(
                "{mark} {} = {} (tolerance {})",
                c["name"].as_str().unwrap_or("?"),
                c["value"],
                c["tolerance"]
            );
        }
    }
    if cfg.experimental() {
        println!("note: the y parametrix family is experimental; its errors are reported, not asserted");
    }
    println!("results written to {}", dir.display());
    Ok(outcome.pass)
}
