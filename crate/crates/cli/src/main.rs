use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use netzero_cli::{run, write_report, Command, Options};

/// Invariant zeros of networked discrete-time LTI systems.
#[derive(Debug, Parser)]
#[command(name = "netzero", version)]
struct Args {
    command: Command,
    /// JSON model file.
    #[arg(long)]
    model: PathBuf,
    /// Block size for `block`.
    #[arg(long = "T", default_value_t = 2)]
    block: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matching tolerance for zero sets.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Sample points per normal-rank estimate.
    #[arg(long, default_value_t = 7)]
    samples: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = Options {
        command: args.command,
        model: args.model,
        block: args.block,
        seed: args.seed,
        tol: args.tol,
        samples: args.samples,
    };
    let report = match run(&opts) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("netzero: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = write_report(&report, args.out.as_deref()) {
        eprintln!("netzero: {e}");
        return ExitCode::from(e.exit_code());
    }
    if let Some(v) = &report.violation {
        eprintln!("netzero: hypothesis violated: {}", v.hypothesis);
    }
    for check in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("netzero: check failed: {} ({})", check.name, check.detail);
    }
    ExitCode::from(report.exit_code())
}
