use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Command;

/// Everything needed to reproduce a run's output files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Subcommand and its fully resolved arguments (config file and
    /// environment already applied).
    pub command: Command,
    pub seed: Option<u64>,
    /// Input files with their contents, so a replay does not depend on them
    /// still being on disk.
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<OutputRecord>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    /// Command-specific results, for reading without parsing the outputs.
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub content: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OutputRecord {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

impl OutputRecord {
    pub fn of(path: &Path) -> Result<Self> {
        let data = std::fs::read(path).with_context(|| format!("reading back {}", path.display()))?;
        Ok(Self {
            path: path.to_path_buf(),
            bytes: data.len() as u64,
            sha256: Sha256::digest(&data).iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

pub fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// `<first output>.manifest.json` unless overridden.
pub fn default_path(command: &Command) -> Option<PathBuf> {
    let first = command.outputs().into_iter().next()?;
    let mut name = first.file_name()?.to_os_string();
    name.push(".manifest.json");
    Some(first.with_file_name(name))
}

pub fn load(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

/// Reads input files, preferring contents embedded in a manifest being
/// replayed, and remembers what was read.
#[derive(Debug, Default)]
pub struct Inputs {
    embedded: BTreeMap<PathBuf, String>,
    pub records: Vec<InputRecord>,
}

impl Inputs {
    pub fn from_manifest(m: &RunManifest) -> Self {
        Self {
            embedded: m.inputs.iter().map(|r| (r.path.clone(), r.content.clone())).collect(),
            records: Vec::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let content = match self.embedded.get(path) {
            Some(c) => c.clone(),
            None => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        };
        self.records.push(InputRecord {
            path: path.to_path_buf(),
            content: content.clone(),
        });
        Ok(content)
    }
}
