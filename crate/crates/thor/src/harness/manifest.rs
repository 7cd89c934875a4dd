//! Run manifests: what ran, with which inputs and config, written atomically
//! alongside every output.

use super::config_file::RunConfig;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub const MANIFEST_FILE: &str = "MANIFEST.json";

/// One record per invocation: subcommand, resolved config, inputs, outputs,
/// and wallclock. Reports stay byte-stable; the timing lives here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub jobs: usize,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub wallclock_secs: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, jobs: usize, config: RunConfig) -> RunManifest {
        RunManifest {
            tool: "thor".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            seed,
            jobs,
            config,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            wallclock_secs: 0.0,
        }
    }

    pub fn input(mut self, name: &str, path: impl Into<String>) -> RunManifest {
        self.inputs.insert(name.to_string(), path.into());
        self
    }

    pub fn output(&mut self, path: impl Into<String>) {
        self.outputs.push(path.into());
    }

    /// Serialize to `<dir>/MANIFEST.json` via a temp file and rename, so a
    /// crash never leaves a half-written manifest.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        write_atomic(&path, body.as_bytes())?;
        Ok(path)
    }
}

/// Write via sibling temp file + rename; creates parent directories.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
