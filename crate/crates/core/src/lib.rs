pub mod annotate;
pub mod charmetrics;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod scenario;
pub mod seed;
pub mod stft;
pub mod synth;

pub use error::{Error, Result};
