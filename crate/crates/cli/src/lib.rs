//! Library side of the `solver` binary: configuration loading and the four
//! subcommands, each of which returns its artifacts in memory so that
//! nothing is written unless the command got far enough to produce them.

pub mod commands;
pub mod config;

use std::fs;
use std::path::Path;

pub use commands::{execute, Command, CommandOutput};
pub use config::{RunConfig, Setup};

/// Exit status for a command that ran to completion but whose checks failed.
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<moisture_core::Error> for CliError {
    fn from(e: moisture_core::Error) -> Self {
        match e {
            moisture_core::Error::Config(msg) => CliError::Config(msg),
            other => CliError::Solver(other.to_string()),
        }
    }
}

/// A named output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    let io = |e: std::io::Error, what: &Path| CliError::Io(format!("{}: {e}", what.display()));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        fs::write(&path, &a.contents).map_err(|e| io(e, &path))?;
    }
    Ok(())
}

/// Loads the configuration, runs `command` and writes its artifacts;
/// returns the process exit status.
pub fn run_cli(command: Command, config: &Path, out: Option<&Path>, seed: Option<u64>) -> i32 {
    let result = Setup::load(config, out, seed).and_then(|setup| {
        let output = execute(command, &setup)?;
        write_artifacts(&setup.output_dir, &output.artifacts)?;
        Ok(output)
    });
    match result {
        Ok(output) => {
            print!("{}", output.summary);
            if output.passed {
                0
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
