//! Experiment runner: TOML configs in, CSV datasets out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use config::{Config, SweepConfig};
pub use error::{XpError, XpResult};
pub use sweep::{run_sweep, SweepRow};
