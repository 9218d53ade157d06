//! File-level pipeline around `camocodec-core`: image/WAV/feature/model files,
//! CSV manifests, JSON configuration, parallel feature extraction, synthetic
//! fixtures and the subcommands behind the `camocodec` binary.

pub mod config;
pub mod error;
pub mod features;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod synth;

pub use camocodec_core as core;
pub use config::PipelineConfig;
pub use error::{Error, Result};
