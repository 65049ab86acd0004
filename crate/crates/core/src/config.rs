//! Run configuration: defaults, `key = value` files, and validation.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Embedding width `d`.
    pub dim: usize,
    /// Number of latent intents `K`.
    pub n_intents: usize,
    pub max_len: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub lambda_elbo: f64,
    pub beta_max: f64,
    pub kl_warmup_epochs: usize,
    /// Monte Carlo draws of the noise per sequence per pass.
    pub mc_samples: usize,
    pub k_core: usize,
    pub eval_k: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            dim: 32,
            n_intents: 4,
            max_len: 50,
            lr: 1e-3,
            epochs: 200,
            batch_size: 16,
            lambda_elbo: 0.1,
            beta_max: 1.0,
            kl_warmup_epochs: 10,
            mc_samples: 1,
            k_core: 5,
            eval_k: 10,
            seed: 42,
        }
    }
}

const KEYS: [&str; 13] = [
    "d",
    "K",
    "max_len",
    "lr",
    "epochs",
    "batch_size",
    "lambda_elbo",
    "beta_max",
    "kl_warmup_epochs",
    "mc_samples",
    "k_core",
    "eval_k",
    "seed",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value {value:?} for {key}")))
}

impl Config {
    /// Sets one field by its file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "d" | "dim" => self.dim = parse_value(key, value)?,
            "K" | "n_intents" => self.n_intents = parse_value(key, value)?,
            "max_len" => self.max_len = parse_value(key, value)?,
            "lr" => self.lr = parse_value(key, value)?,
            "epochs" => self.epochs = parse_value(key, value)?,
            "batch_size" => self.batch_size = parse_value(key, value)?,
            "lambda_elbo" => self.lambda_elbo = parse_value(key, value)?,
            "beta_max" => self.beta_max = parse_value(key, value)?,
            "kl_warmup_epochs" => self.kl_warmup_epochs = parse_value(key, value)?,
            "mc_samples" => self.mc_samples = parse_value(key, value)?,
            "k_core" => self.k_core = parse_value(key, value)?,
            "eval_k" => self.eval_k = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", n + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the configuration in the same `key = value` syntax `parse` reads.
    pub fn to_kv_string(&self) -> String {
        let values = [
            self.dim.to_string(),
            self.n_intents.to_string(),
            self.max_len.to_string(),
            self.lr.to_string(),
            self.epochs.to_string(),
            self.batch_size.to_string(),
            self.lambda_elbo.to_string(),
            self.beta_max.to_string(),
            self.kl_warmup_epochs.to_string(),
            self.mc_samples.to_string(),
            self.k_core.to_string(),
            self.eval_k.to_string(),
            self.seed.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Counts must be at least 1 and rates non-negative. `epochs = 0` and
    /// `lr = 0` are accepted as frozen runs.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d", self.dim),
            ("K", self.n_intents),
            ("max_len", self.max_len),
            ("batch_size", self.batch_size),
            ("mc_samples", self.mc_samples),
            ("k_core", self.k_core),
            ("eval_k", self.eval_k),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        for (name, v) in [
            ("lr", self.lr),
            ("lambda_elbo", self.lambda_elbo),
            ("beta_max", self.beta_max),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}
