//! Simulation and verification of super-robust nonadiabatic holonomic gates
//! in decoherence-free subspaces of coupled transmons.
//!
//! Units: time in ns, angular frequencies in rad/ns. Density matrices are
//! vectorized by column stacking.

pub mod device;
pub mod error;
pub mod holonomy;
pub mod metrics;
pub mod open_system;
pub mod qdyn;
pub mod tol;

pub use error::{Error, Result};
