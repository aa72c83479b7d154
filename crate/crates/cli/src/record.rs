//! Run records: `runs/<timestamp>-<hash>/record.json`.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::Command;
use crate::error::CliError;
use crate::output::to_json;

pub const RECORD_FILE: &str = "record.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: u32,
    pub command_line: Vec<String>,
    /// Resolved configuration, seeds included; enough to replay the run.
    pub config: Command,
    pub seeds: Vec<u64>,
    /// SHA-256 of the serialized config.
    pub input_hash: String,
    pub started: String,
    pub finished: String,
    pub payload: Value,
}

pub fn input_hash(config: &Command) -> String {
    let digest = Sha256::digest(to_json(config).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunRecord {
    pub fn new(
        command_line: Vec<String>,
        config: Command,
        seeds: Vec<u64>,
        started: DateTime<Utc>,
        finished: DateTime<Utc>,
        payload: Value,
    ) -> Self {
        RunRecord {
            schema: 1,
            command_line,
            input_hash: input_hash(&config),
            config,
            seeds,
            started: timestamp(&started),
            finished: timestamp(&finished),
            payload,
        }
    }

    /// Writes the record into a fresh directory under `root` and returns it.
    pub fn write(&self, root: &Path, started: &DateTime<Utc>) -> Result<PathBuf, CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", root.display()));
        fs::create_dir_all(root).map_err(io)?;
        let base = format!("{}-{}", started.format("%Y%m%dT%H%M%S%.3fZ"), &self.input_hash[..12]);
        let mut dir = root.join(&base);
        let mut suffix = 1;
        while dir.exists() {
            dir = root.join(format!("{base}-{suffix}"));
            suffix += 1;
        }
        fs::create_dir(&dir).map_err(io)?;
        fs::write(dir.join(RECORD_FILE), to_json(self) + "\n").map_err(io)?;
        Ok(dir)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = if path.is_dir() { path.join(RECORD_FILE) } else { path.to_path_buf() };
        let text = fs::read_to_string(&file).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: invalid run record: {e}", file.display())))
    }
}
