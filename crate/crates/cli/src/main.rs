use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use moisture_cli::{run_cli, Command};

/// Moisture transport solver: Kirchhoff-transformed finite volumes with a
/// Picard fixed-point driver over adaptive time windows.
#[derive(Debug, Parser)]
#[command(name = "solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` in the file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites (overrides `seed` in the file).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Solve on [0, T] with adaptive Picard windows.
    Run(Common),
    /// Manufactured-solution convergence study.
    Verify(Common),
    /// Empirical contraction factor of the solution operator.
    Contraction(Common),
    /// Structural assumptions and lemma property suite.
    Validate(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, common) = match cli.command {
        Sub::Run(c) => (Command::Run, c),
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Contraction(c) => (Command::Contraction, c),
        Sub::Validate(c) => (Command::Validate, c),
    };
    let code = run_cli(command, &common.config, common.out.as_deref(), common.seed);
    ExitCode::from(code as u8)
}
