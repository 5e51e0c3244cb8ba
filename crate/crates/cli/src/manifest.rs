use std::path::{Path, PathBuf};

use nsv_core::verify::CheckResult;
use nsv_core::NsvError;
use serde::Serialize;
use serde_json::Value;

use crate::commands::Failure;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InputError,
    RunError,
    ChecksFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub message: String,
    /// Simulation time of the failure, when known.
    pub time: Option<f64>,
}

/// Record of one invocation, written even when the run fails.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub input: String,
    pub version: String,
    pub status: Status,
    pub exit_code: u8,
    pub wall_clock_seconds: f64,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    /// Parsed configuration, or the raw text when it did not parse.
    pub config: Value,
    pub outputs: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub summary: Value,
    pub error: Option<ErrorRecord>,
}

impl Manifest {
    pub fn new(command: &str, input: &str, threads: Option<usize>, seed: Option<u64>) -> Self {
        Manifest {
            command: command.to_string(),
            input: input.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: Status::Ok,
            exit_code: 0,
            wall_clock_seconds: 0.0,
            threads,
            seed,
            config: Value::Null,
            outputs: Vec::new(),
            checks: Vec::new(),
            summary: Value::Null,
            error: None,
        }
    }

    pub fn finish(&mut self, failure: Option<Failure>) {
        let Some(f) = failure else {
            return;
        };
        self.exit_code = f.exit_code();
        self.status = match f {
            Failure::Input(_) => Status::InputError,
            Failure::Run(_) => Status::RunError,
            Failure::Checks(_) => Status::ChecksFailed,
        };
        let time = match &f {
            Failure::Run(NsvError::FixedPointDiverged { time, .. }) | Failure::Run(NsvError::NonFinite { time }) => {
                Some(*time)
            }
            _ => None,
        };
        self.error = Some(ErrorRecord {
            message: f.to_string(),
            time,
        });
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
