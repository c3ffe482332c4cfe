//! Numerical tolerances shared across the crate.

/// Hermiticity / unitarity flags on operators (max-norm).
pub const OPERATOR: f64 = 1e-10;
/// Orthonormality of bases handed to [`crate::qdyn::projector`].
pub const ORTHONORMAL: f64 = 1e-10;
/// Norm of physical state vectors.
pub const STATE_NORM: f64 = 1e-10;
/// Trace of density matrices.
pub const DENSITY_TRACE: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a density matrix.
pub const DENSITY_EIGEN: f64 = 1e-9;
/// Unitarity of compiled propagators.
pub const PROPAGATOR_UNITARY: f64 = 1e-9;
/// Total duration of a schedule versus the sum of its segments.
pub const SCHEDULE_DURATION: f64 = 1e-12;
/// Trace drift that aborts a density-matrix propagation.
pub const TRACE_ABORT: f64 = 1e-6;
/// Trace preservation expected of physical channels.
pub const CHANNEL_TRACE: f64 = 1e-8;
/// Most negative Choi eigenvalue accepted as numerical noise.
pub const CHOI_EIGEN: f64 = 1e-7;
/// Choi eigenvalue below which a channel is rejected outright.
pub const CHOI_ABORT: f64 = 1e-6;
/// Leakage above which a logical channel is treated as mis-compiled.
pub const LEAKAGE_ABORT: f64 = 0.5;
/// Threshold for the super-robust integral defect.
pub const SR_DEFECT: f64 = 1e-6;
/// Threshold for cyclicity and parallel-transport defects.
pub const GEOMETRIC_DEFECT: f64 = 1e-9;
