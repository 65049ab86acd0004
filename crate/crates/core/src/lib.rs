//! Sequential recommendation with multi-intent attention pooling and
//! Gaussian behavioral-uncertainty states.
//!
//! The [`model`] module holds the forward mathematics, [`training`] the
//! evidence-bound objective with hand-derived gradients, [`data`] ingestion
//! and preprocessing, and [`eval`] ranking metrics plus the cold-start and
//! temporal-disturbance protocols.

pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod training;

pub use config::Config;
pub use error::{Error, Result};
pub use model::{
    GaussianState, IntentAttention, Model, ModelConfig, ModelParams, UserRepresentation,
};
