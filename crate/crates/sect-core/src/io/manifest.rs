//! Reproducibility manifests: every command writes one next to its
//! outputs, echoing the configuration and digesting inputs and outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created_utc: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            tool: "sect".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: digest_file(path)?,
        });
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: digest_file(path)?,
        });
        Ok(())
    }

    /// Serializes to pretty JSON and writes atomically.
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidArgument(format!("manifest serialization: {e}")))?;
        super::write_atomic(path, json.as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(e).in_file(path))?;
    Ok(sha256_hex(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let manifest = RunManifest::new("test", serde_json::json!({"alpha": 0.05}));
        let json = serde_json::to_string(&manifest).unwrap();
        let back: RunManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back.command, "test");
        assert_eq!(back.config["alpha"], 0.05);
    }
}
