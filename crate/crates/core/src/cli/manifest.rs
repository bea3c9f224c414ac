use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Record of one command invocation and everything it wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub code_version: String,
    /// sha256 of the config file, or of the parameter JSON when there is none
    pub input_digest: String,
    pub outputs: Vec<OutputFile>,
    pub wall_time_s: f64,
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects output files for one run and writes `manifest.json` last.
pub struct OutputSet {
    dir: PathBuf,
    command: String,
    parameters: serde_json::Value,
    input_digest: String,
    outputs: Vec<OutputFile>,
    started: Instant,
}

impl OutputSet {
    pub fn new(dir: &Path, command: &str, parameters: serde_json::Value, config: Option<&[u8]>) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let input_digest = match config {
            Some(bytes) => sha256_hex(bytes),
            None => sha256_hex(parameters.to_string().as_bytes()),
        };
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            parameters,
            input_digest,
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)?;
        self.outputs.push(OutputFile {
            path: name.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| crate::EdgeError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(self) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: self.input_digest,
            outputs: self.outputs,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| crate::EdgeError::Io(e.to_string()))?;
        std::fs::write(self.dir.join("manifest.json"), text + "\n")?;
        Ok(manifest)
    }
}
