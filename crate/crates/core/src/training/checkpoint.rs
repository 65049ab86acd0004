//! Versioned JSON checkpoints. `f64` values are written in shortest
//! round-trip form and parsed back exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::model::Model;

const FORMAT: &str = "intentrec-checkpoint";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    format: String,
    version: u32,
    pub config: Config,
    pub seed: u64,
    pub model: Model,
}

impl Checkpoint {
    pub fn new(config: Config, model: Model) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION,
            seed: config.seed,
            config,
            model,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_slice(bytes)?;
        if ck.format != FORMAT || ck.version != VERSION {
            return Err(Error::UnsupportedFile(format!(
                "expected {FORMAT} v{VERSION}, found {} v{}",
                ck.format, ck.version
            )));
        }
        let model = Model::from_parts(ck.model.config, ck.model.params.clone())?;
        if !model.params.all_finite() {
            return Err(Error::NonFinite("checkpoint parameters"));
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
