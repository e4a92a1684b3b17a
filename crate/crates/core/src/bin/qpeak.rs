use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qpeak::cli::{self, RunOptions};
use qpeak::Error;

/// Peaked-ensemble statevector experiments.
///
/// Basis indices are little-endian: bit k of the integer index z is the
/// measured value of qubit k (qubit 0 is the least significant bit).
/// Exit codes: 0 success, 2 validation, 3 capacity, 4 I/O.
#[derive(Parser)]
#[command(name = "qpeak", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: $QPEAK_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Omit the generated_unix line from CSV headers.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            workers,
            out_dir,
            no_timestamp,
        } => {
            let cfg = match cli::load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let opts = RunOptions {
                seed_override: seed,
                workers,
                out_dir_override: out_dir,
                timestamp: !no_timestamp,
            };
            match cli::run(cfg, &opts) {
                Ok(outcome) => {
                    println!("{}", outcome.summary);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate { config } => {
            let cfg = match cli::load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let diags = cli::validate(&cfg);
            if diags.is_empty() {
                println!("ok");
                return ExitCode::SUCCESS;
            }
            for d in &diags {
                eprintln!("{d}");
            }
            let capacity = diags.iter().any(|d| d.kind == cli::DiagnosticKind::Capacity);
            ExitCode::from(if capacity { 3 } else { 2 })
        }
    }
}
