use super::operator::{c, CMatrix, Operator};
use super::schedule::PulseSchedule;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::tol;

/// `exp(−i H t)` of a Hermitian matrix through its eigendecomposition.
/// The input is symmetrized first, so callers must have checked
/// Hermiticity.
pub(crate) fn hermitian_exp(h: &CMatrix, t: f64) -> CMatrix {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let ph = c(0.0, -lambda * t).exp();
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= ph;
        }
    }
    scaled * v.adjoint()
}

/// `exp(−i H t)` for a constant Hermitian generator (t in ns, H in rad/ns).
pub fn expm_generator(h: &Operator, t: f64) -> Result<Operator> {
    h.require_hermitian()?;
    Operator::new(h.space().clone(), hermitian_exp(h.matrix(), t))
}

/// Total propagator `U(τ,0) = U_n ⋯ U_1` of a piecewise-constant schedule.
pub fn propagator(schedule: &PulseSchedule) -> Operator {
    let d = schedule.space().total_dim();
    let mut u = CMatrix::identity(d, d);
    for seg in schedule.segments() {
        u = hermitian_exp(seg.hamiltonian.matrix(), seg.duration) * u;
    }
    Operator::new(schedule.space().clone(), u).expect("dimensions fixed by the schedule")
}

/// Evolve `psi0` through the schedule; returns the final state and the
/// total propagator.
pub fn evolve_piecewise(
    schedule: &PulseSchedule,
    psi0: &StateVector,
) -> Result<(StateVector, Operator)> {
    if psi0.space() != schedule.space() {
        return Err(Error::DimensionMismatch {
            expected: schedule.space().total_dim(),
            found: psi0.space().total_dim(),
        });
    }
    let u = propagator(schedule);
    u.require_unitary(tol::PROPAGATOR_UNITARY)?;
    let psi = u.apply(psi0)?;
    Ok((psi, u))
}
