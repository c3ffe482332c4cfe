//! Gate and state fidelities.

use crate::error::{Error, Result};
use crate::open_system::Superoperator;
use crate::qdyn::{DensityMatrix, Operator, StateVector};
use crate::tol;

/// Channel quality against an ideal unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub avg_gate_fidelity: f64,
    pub process_fidelity: f64,
    /// Average trace lost from the logical block.
    pub leakage: f64,
}

/// Average gate fidelity `(|Tr(U†V)|² + d) / (d(d+1))` between two unitaries.
pub fn avg_fidelity_unitary(u: &Operator, v: &Operator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    u.require_unitary(tol::PROPAGATOR_UNITARY)?;
    v.require_unitary(tol::PROPAGATOR_UNITARY)?;
    let d = u.dim() as f64;
    let overlap = (u.matrix().adjoint() * v.matrix()).trace().norm_sqr();
    Ok(((overlap + d) / (d * (d + 1.0))).min(1.0))
}

/// Process and average fidelity of a (possibly trace-decreasing) channel.
///
/// `F_pro = Tr(S_ideal† S)/d²`. With leakage `ℓ = 1 − (1/d)(vec I)† S (vec I)`
/// the Haar-averaged fidelity is `(d·F_pro + 1 − ℓ)/(d + 1)`, which is the
/// usual `(d·F_pro + 1)/(d + 1)` for trace-preserving channels.
pub fn avg_fidelity_channel(s: &Superoperator, ideal: &Operator) -> Result<FidelityReport> {
    if s.dim() != ideal.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: ideal.dim(),
        });
    }
    ideal.require_unitary(tol::PROPAGATOR_UNITARY)?;
    let d = s.dim() as f64;
    let target = Superoperator::from_unitary(ideal);
    let process = ((target.matrix().adjoint() * s.matrix()).trace().re / (d * d)).clamp(0.0, 1.0);
    let leakage = (1.0 - s.mean_trace_retained()).max(0.0);
    let avg = ((d * process + 1.0 - leakage) / (d + 1.0)).clamp(0.0, 1.0);
    Ok(FidelityReport {
        avg_gate_fidelity: avg,
        process_fidelity: process,
        leakage,
    })
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.space().total_dim() != psi.space().total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.space().total_dim(),
            found: psi.space().total_dim(),
        });
    }
    let a = psi.amplitudes();
    let value = (a.adjoint() * rho.matrix() * a)[(0, 0)].re;
    Ok(value.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::open_system::{channel_superoperator, NoiseSpec, Topology};
    use crate::qdyn::testing::*;
    use crate::qdyn::{c, expm_generator, local, phase, CMatrix, HilbertSpace, PulseSchedule};

    fn random_unitary(seed: u64, dim: usize) -> Operator {
        let mut r = rng(seed);
        let h = Operator::local(random_hermitian(&mut r, dim)).unwrap();
        expm_generator(&h, 1.0).unwrap()
    }

    #[test]
    fn unitary_fidelity_basics() {
        let u = random_unitary(3, 4);
        assert!((avg_fidelity_unitary(&u, &u).unwrap() - 1.0).abs() < 1e-14);
        let f = avg_fidelity_unitary(&local::identity(2), &local::pauli_x()).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-15);
        for alpha in [0.3, 1.7, -2.9] {
            let v = u.scaled(phase(alpha));
            assert!((avg_fidelity_unitary(&u, &v).unwrap() - 1.0).abs() < 1e-13);
        }
        let not_unitary = local::pauli_x().scaled_real(2.0);
        assert!(avg_fidelity_unitary(&u, &not_unitary).is_err());
    }

    #[test]
    fn channel_fidelity_of_ideal_gate() {
        let u = random_unitary(8, 3);
        let report = avg_fidelity_channel(&Superoperator::from_unitary(&u), &u).unwrap();
        assert!((report.avg_gate_fidelity - 1.0).abs() < 1e-13);
        assert!(report.leakage < 1e-13);
    }

    #[test]
    fn channel_and_unitary_formulas_agree() {
        for seed in 0..5 {
            let u = random_unitary(seed, 2);
            let v = random_unitary(seed + 100, 2);
            let via_channel = avg_fidelity_channel(&Superoperator::from_unitary(&v), &u)
                .unwrap()
                .avg_gate_fidelity;
            let direct = avg_fidelity_unitary(&u, &v).unwrap();
            assert!((via_channel - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn depolarizing_channel_has_half_fidelity() {
        let s = HilbertSpace::qubits(1).unwrap();
        let mut m = CMatrix::zeros(4, 4);
        for col in [0, 3] {
            m[(0, col)] = c(0.5, 0.0);
            m[(3, col)] = c(0.5, 0.0);
        }
        let dep = Superoperator::new(s, m).unwrap();
        let report = avg_fidelity_channel(&dep, &local::identity(2)).unwrap();
        assert!((report.process_fidelity - 0.25).abs() < 1e-15);
        assert!((report.avg_gate_fidelity - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_leakage_scales_fidelity() {
        let u = random_unitary(21, 2);
        for leak in [0.0, 0.01, 0.2] {
            let m = u.matrix() * c((1.0 - leak as f64).sqrt(), 0.0);
            let s = Superoperator::from_kraus_block(u.space(), &m);
            let report = avg_fidelity_channel(&s, &u).unwrap();
            assert!((report.process_fidelity - (1.0 - leak)).abs() < 1e-13);
            assert!((report.leakage - leak).abs() < 1e-13);
            assert!((report.avg_gate_fidelity - (1.0 - leak)).abs() < 1e-13);
        }
    }

    #[test]
    fn dephasing_never_helps() {
        let h = local::pauli_x().scaled_real(0.5);
        let sched = PulseSchedule::from_pairs(vec![(h, std::f64::consts::PI)]).unwrap();
        let ideal = crate::qdyn::propagator(&sched);
        let mut last = 1.0 + 1e-15;
        for t2 in [f64::INFINITY, 10.0, 1.0, 0.1, 0.01] {
            let noise = NoiseSpec::new(0.0, t2, Topology::Collective).unwrap();
            let f = avg_fidelity_channel(&channel_superoperator(&sched, &noise).unwrap(), &ideal)
                .unwrap()
                .avg_gate_fidelity;
            assert!(f <= last);
            last = f;
        }
        assert!(last < 0.99);
    }

    #[test]
    fn state_fidelity_cases() {
        let s = HilbertSpace::qubits(1).unwrap();
        let zero = StateVector::basis(&s, &[0]).unwrap();
        let one = StateVector::basis(&s, &[1]).unwrap();
        let rho = DensityMatrix::from_pure(&zero);
        assert!((state_fidelity(&rho, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_fidelity(&rho, &one).unwrap().abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(&s);
        let plus = StateVector::from_amplitudes(s, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!((state_fidelity(&mixed, &plus).unwrap() - 0.5).abs() < 1e-15);
    }
}
