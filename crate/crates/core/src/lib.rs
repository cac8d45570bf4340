//! Density-informed multimodal breast-screening engine.

pub mod app;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod fusion;
pub mod imgproc;
pub mod kv;
pub mod model;
pub mod radiomics;
pub mod risk;
pub mod scores;
pub mod segment;
pub mod thermal_io;

pub use error::{Error, Result};
