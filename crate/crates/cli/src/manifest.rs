//! Per-run manifest: what ran, with which configuration, on which data, and
//! which files it produced.

use std::path::{Path, PathBuf};

use intentrec::Config;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Config,
    /// The same configuration in config-file syntax; feeding it back through
    /// `--config` reproduces the run.
    pub config_text: String,
    pub dataset: Option<PathBuf>,
    /// SHA-256 of the dataset file, hex encoded.
    pub dataset_sha256: Option<String>,
    pub checkpoint: Option<PathBuf>,
    pub artifacts: Vec<PathBuf>,
    pub elapsed_secs: f64,
    pub summary: serde_json::Value,
}

/// Hex SHA-256 of a file's bytes.
pub fn fingerprint(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

impl RunManifest {
    pub fn new(command: &str, config: &Config) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            config_text: config.to_kv_string(),
            dataset: None,
            dataset_sha256: None,
            checkpoint: None,
            artifacts: Vec::new(),
            elapsed_secs: 0.0,
            summary: serde_json::Value::Null,
        }
    }

    pub fn set_dataset(&mut self, path: &Path) -> Result<(), Failure> {
        let hash = fingerprint(path).map_err(|e| {
            Failure::Data(anyhow::Error::new(e).context(path.display().to_string()))
        })?;
        self.dataset = Some(path.to_path_buf());
        self.dataset_sha256 = Some(hash);
        Ok(())
    }

    /// Every path the manifest names, artifacts first.
    pub fn referenced(&self) -> Vec<&Path> {
        self.artifacts
            .iter()
            .chain(&self.dataset)
            .chain(&self.checkpoint)
            .map(PathBuf::as_path)
            .collect()
    }

    /// Writes `<dir>/<command>_manifest.json` after checking that every
    /// referenced file exists. Returns the manifest path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, Failure> {
        if let Some(missing) = self.referenced().into_iter().find(|p| !p.is_file()) {
            return Err(Failure::Data(anyhow::anyhow!(
                "manifest references missing file {}",
                missing.display()
            )));
        }
        let path = dir.join(format!("{}_manifest.json", self.command));
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| Failure::Data(e.into()))?;
        bytes.push(b'\n');
        std::fs::write(&path, bytes).map_err(|e| {
            Failure::Data(anyhow::Error::new(e).context(path.display().to_string()))
        })?;
        Ok(path)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}
