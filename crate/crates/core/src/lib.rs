//! Site-specific ray tracing for mmWave and sub-THz channels, with material loss
//! calibration from directional measurements and channel spread statistics.

pub mod antenna;
pub mod calibration;
pub mod channel_stats;
mod error;
pub mod geometry;
pub mod io;
pub mod propagation;
pub mod tracer;

pub use error::{Error, Result};
