//! Experiment harness around the `gptshape` library: forward GPT documents,
//! noise injection, recovery with any of the three methods, curve
//! comparison metrics and figure reproductions.

pub mod commands;
pub mod curve;
pub mod demo;
pub mod document;
pub mod error;
pub mod experiment;
pub mod metrics;

pub use error::{CliError, CliResult};
