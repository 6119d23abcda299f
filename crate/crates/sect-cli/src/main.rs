//! `sect`: Euler characteristic transforms of 2-D binary shapes and
//! permutation two-sample tests between shape collections.
//!
//! Subcommands: `transform` turns images into curve-matrix CSVs, `test`
//! runs the permutation test between two directories of matrices, and
//! `simulate` reproduces the bundled rejection-rate experiment.
//!
//! Exit codes: 0 success (`test`: null accepted), 3 null rejected,
//! 64 usage, 65 malformed data, 66 missing input, 74 other I/O errors.

use std::process::ExitCode;

use clap::Parser;

mod simulate;
mod transform;
mod util;

#[derive(Parser)]
#[command(
    name = "sect",
    version,
    about = "Shape transforms and permutation tests between shape collections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Transform binary/grayscale images into curve-matrix CSVs
    Transform(transform::TransformArgs),
    /// Permutation two-sample test between two directories of matrices
    Test(test::TestArgs),
    /// Rejection-rate simulation over the bundled shape family
    Simulate(simulate::SimulateArgs),
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("SECT_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not configure {n} worker threads: {e}");
                }
            }
            _ => log::warn!("ignoring SECT_THREADS={value}: expected a positive integer"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(util::EXIT_USAGE);
        }
    };
    let outcome = match cli.command {
        Command::Transform(args) => transform::run(args),
        Command::Test(args) => test::run(args),
        Command::Simulate(args) => simulate::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
