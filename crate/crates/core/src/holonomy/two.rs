//! Two logical qubits in the two-excitation subspace of four transmons.
//!
//! Factor dimensions `(2, 3, 2, 2)` for `(Q₁, Q₂, Q₃, Q₄)`; only `Q₂` needs
//! its second excited level. `|00⟩_L = |1010⟩`, `|01⟩_L = |1001⟩`,
//! `|10⟩_L = |0110⟩`, `|11⟩_L = |0101⟩` and the auxiliary `|A⟩ = |0200⟩`.
//! The exchange terms only act on `|10⟩_L, |11⟩_L, |A⟩`, which form one
//! Rabi loop with bright state `|B⟩` and dark state `|D⟩`.

use std::f64::consts::{PI, TAU};

use super::single::{mix, ProtocolKind};
use super::{check_loops, logical_channel, ConditionReport, GateEvaluation, GateRun, PhaseProfile, RabiLoop};
use crate::error::{Error, Result};
use crate::metrics::avg_fidelity_channel;
use crate::open_system::NoiseSpec;
use crate::qdyn::{c, local, phase, tensor, CMatrix, HilbertSpace, Operator, PulseSchedule, StateVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLogicalEncoding {
    space: HilbertSpace,
}

impl Default for TwoLogicalEncoding {
    fn default() -> Self {
        Self::new()
    }
}

const LOGICAL_LEVELS: [[usize; 4]; 4] = [[1, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1]];
const AUX_LEVELS: [usize; 4] = [0, 2, 0, 0];

impl TwoLogicalEncoding {
    pub fn new() -> Self {
        Self {
            space: HilbertSpace::new(vec![2, 3, 2, 2]).expect("valid dims"),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// `|xy⟩_L` for `index = 2x + y`.
    pub fn logical_ket(&self, index: usize) -> StateVector {
        StateVector::basis(&self.space, &LOGICAL_LEVELS[index]).expect("valid levels")
    }

    pub fn logical_kets(&self) -> [StateVector; 4] {
        std::array::from_fn(|k| self.logical_ket(k))
    }

    pub fn aux(&self) -> StateVector {
        StateVector::basis(&self.space, &AUX_LEVELS).expect("valid levels")
    }

    /// Basis indices of `|00⟩_L, |01⟩_L, |10⟩_L, |11⟩_L`.
    pub fn logical_indices(&self) -> [usize; 4] {
        std::array::from_fn(|k| self.space.index_of(&LOGICAL_LEVELS[k]).expect("valid levels"))
    }

    pub fn aux_index(&self) -> usize {
        self.space.index_of(&AUX_LEVELS).expect("valid levels")
    }

    /// `|B⟩ = sin(θ/2)|10⟩_L − cos(θ/2)e^{−iφ}|11⟩_L`.
    pub fn bright(&self, theta: f64, varphi: f64) -> StateVector {
        let (s, co) = (0.5 * theta).sin_cos();
        mix(c(s, 0.0), &self.logical_ket(2), -phase(-varphi) * co, &self.logical_ket(3))
    }

    /// `|D⟩ = cos(θ/2)|10⟩_L + sin(θ/2)e^{−iφ}|11⟩_L`.
    pub fn dark(&self, theta: f64, varphi: f64) -> StateVector {
        let (s, co) = (0.5 * theta).sin_cos();
        mix(c(co, 0.0), &self.logical_ket(2), phase(-varphi) * s, &self.logical_ket(3))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGateParams {
    pub theta: f64,
    pub varphi: f64,
    /// Effective strength `G` in rad/ns.
    pub g_total: f64,
    pub tau: f64,
    /// `Φ₁(t)`.
    pub phi1: PhaseProfile,
}

impl TwoQubitGateParams {
    pub fn new(theta: f64, varphi: f64, g_total: f64, tau: f64, phi1: PhaseProfile) -> Result<Self> {
        let p = Self {
            theta,
            varphi,
            g_total,
            tau,
            phi1,
        };
        p.validate()?;
        Ok(p)
    }

    /// Double loop over `τ` (`Ω(τ) = 4π` at `G = 2π/τ`) with the staircase
    /// `0, γ_g/2, 0, γ_g/2`; the rotated block acquires `e^{−iγ_g}` on `|B⟩`.
    pub fn super_robust(theta: f64, varphi: f64, gamma_g: f64, tau: f64) -> Result<Self> {
        let step = 0.5 * gamma_g;
        let profile = PhaseProfile::staircase(&[0.0, step, 0.0, step], tau)?;
        Self::new(theta, varphi, TAU / tau, tau, profile)
    }

    /// Single loop over `τ/2` with phases `0, π + γ_g`.
    pub fn conventional(theta: f64, varphi: f64, gamma_g: f64, tau: f64) -> Result<Self> {
        let profile = PhaseProfile::staircase(&[0.0, PI + gamma_g], 0.5 * tau)?;
        Self::new(theta, varphi, TAU / tau, tau, profile)
    }

    /// `θ = π/2`, `φ = 0`, `γ_g = π`.
    pub fn cnot(tau: f64) -> Result<Self> {
        Self::super_robust(PI / 2.0, 0.0, PI, tau)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!("theta = {} outside [0, π]", self.theta)));
        }
        if !self.varphi.is_finite() {
            return Err(Error::InvalidParameter("non-finite varphi".into()));
        }
        if !(self.g_total > 0.0) || !self.g_total.is_finite() {
            return Err(Error::InvalidParameter(format!("G = {}", self.g_total)));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau = {}", self.tau)));
        }
        Ok(())
    }

    /// `(g'₂₃, g'₂₄) = (G sin(θ/2), −G cos(θ/2)e^{−iφ})`.
    pub fn couplings(&self) -> (C64, C64) {
        let (s, co) = (0.5 * self.theta).sin_cos();
        (c(self.g_total * s, 0.0), -phase(-self.varphi) * (self.g_total * co))
    }
}

/// `e^{−iΦ₁}(g'₂₃|11⟩₂₃<20| + g'₂₄|11⟩₂₄<20|) + h.c.` at a fixed `Φ₁`.
pub fn two_qubit_hamiltonian_at(params: &TwoQubitGateParams, phi1: f64) -> Result<Operator> {
    let (g23, g24) = params.couplings();
    let lower2 = local::transition(3, 1, 2);
    let id = local::identity(2);
    let t23 = tensor(&[id.clone(), lower2.clone(), local::sigma_plus(), id.clone()])?;
    let t24 = tensor(&[id.clone(), lower2, id, local::sigma_plus()])?;
    let half = (t23.scaled(g23) + t24.scaled(g24)).scaled(phase(-phi1));
    Ok(&half + &half.dagger())
}

pub fn two_qubit_hamiltonian(params: &TwoQubitGateParams, t: f64) -> Result<Operator> {
    two_qubit_hamiltonian_at(params, params.phi1.value_at(t))
}

pub fn compile_two_qubit(params: &TwoQubitGateParams) -> Result<PulseSchedule> {
    params.validate()?;
    params.phi1.compile(|p| two_qubit_hamiltonian_at(params, p))
}

/// Four-segment CNOT schedule with `G = 2π/τ` and `g'₂₃ = |g'₂₄| = G/√2`.
pub fn cnot_schedule(tau: f64) -> Result<PulseSchedule> {
    compile_two_qubit(&TwoQubitGateParams::cnot(tau)?)
}

/// Logical 4×4 channel on `|00⟩_L … |11⟩_L` under `(1+δ)H` and dephasing.
pub fn run_two_qubit_gate(schedule: &PulseSchedule, noise: &NoiseSpec) -> Result<GateRun> {
    let enc = TwoLogicalEncoding::new();
    if schedule.space() != enc.space() {
        return Err(Error::DimensionMismatch {
            expected: enc.space().total_dim(),
            found: schedule.space().total_dim(),
        });
    }
    logical_channel(
        schedule,
        &enc.logical_indices(),
        &HilbertSpace::qubits(2)?,
        noise,
    )
}

/// CNOT parameters for a holonomic DFS protocol.
pub fn cnot_params(kind: ProtocolKind, tau: f64) -> Result<TwoQubitGateParams> {
    match kind {
        ProtocolKind::SrNhqcDfs => TwoQubitGateParams::cnot(tau),
        ProtocolKind::NhqcDfs => TwoQubitGateParams::conventional(PI / 2.0, 0.0, PI, tau),
        other => Err(Error::Unsupported(format!("CNOT is not available for {other}"))),
    }
}

/// Compiles, runs and scores the CNOT for `kind`.
pub fn evaluate_cnot(kind: ProtocolKind, tau: f64, noise: &NoiseSpec) -> Result<GateEvaluation> {
    let params = cnot_params(kind, tau)?;
    let run = run_two_qubit_gate(&compile_two_qubit(&params)?, noise)?;
    let fidelity = avg_fidelity_channel(&run.channel, &two_qubit_target(PI / 2.0, 0.0, PI))?;
    Ok(GateEvaluation { run, fidelity })
}

/// Identity on `|00⟩_L, |01⟩_L` and `e^{−iγ/2}e^{iγ n_L·σ_L/2}` on
/// `|10⟩_L, |11⟩_L`, with `n_L = (sinθ cosφ, sinθ sinφ, −cosθ)` and the
/// logical Paulis `σx_L = σx`, `σy_L = −σy`, `σz_L = −σz` in
/// `(|10⟩_L, |11⟩_L)` order. `|D⟩` is fixed and `|B⟩` picks up `e^{−iγ}`.
pub fn two_qubit_target(theta: f64, varphi: f64, gamma_g: f64) -> Operator {
    let n = [theta.sin() * varphi.cos(), theta.sin() * varphi.sin(), -theta.cos()];
    let sigma_l = [
        local::pauli_x(),
        local::pauli_y().scaled_real(-1.0),
        local::pauli_z().scaled_real(-1.0),
    ];
    let n_sigma = sigma_l
        .iter()
        .zip(n)
        .map(|(s, w)| s.scaled_real(w))
        .reduce(|a, b| a + b)
        .expect("three terms");
    let (sg, cg) = (0.5 * gamma_g).sin_cos();
    let block = (local::identity(2).scaled_real(cg) + n_sigma.scaled(c(0.0, sg))).scaled(phase(-0.5 * gamma_g));
    let mut m = CMatrix::identity(4, 4);
    m.view_mut((2, 2), (2, 2)).copy_from(block.matrix());
    Operator::new(HilbertSpace::qubits(2).expect("two qubits"), m).expect("4×4")
}

/// Cyclicity, parallel transport and SR integral of the `|B⟩ ↔ |A⟩` loop.
pub fn verify_two_qubit_conditions(params: &TwoQubitGateParams) -> Result<ConditionReport> {
    params.validate()?;
    let enc = TwoLogicalEncoding::new();
    let lp = RabiLoop {
        bright: enc.bright(params.theta, params.varphi),
        aux: enc.aux(),
        sign: 1.0,
    };
    let darks = [
        enc.dark(params.theta, params.varphi),
        enc.logical_ket(0),
        enc.logical_ket(1),
    ];
    check_loops(&[lp], &darks, &params.phi1, params.g_total, |p| {
        two_qubit_hamiltonian_at(params, p)
    })
}

/// Phases acquired by `|A⟩` and `|B⟩` over the gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRelation {
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl PhaseRelation {
    /// `|γ_A + γ_B|` reduced to `(−π, π]`.
    pub fn defect(&self) -> f64 {
        C64::from_polar(1.0, self.gamma_a + self.gamma_b).arg().abs()
    }
}

/// Eigenphases of the propagator restricted to `span{|A⟩, |B⟩}`, each
/// assigned to the basis state its eigenvector overlaps most.
pub fn aux_bright_phases(u: &Operator, theta: f64, varphi: f64) -> Result<PhaseRelation> {
    let enc = TwoLogicalEncoding::new();
    if u.space() != enc.space() {
        return Err(Error::DimensionMismatch {
            expected: enc.space().total_dim(),
            found: u.dim(),
        });
    }
    let basis = [enc.aux(), enc.bright(theta, varphi)];
    let m = CMatrix::from_fn(2, 2, |i, j| u.element(&basis[i], &basis[j]));
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr * 0.25 - det).sqrt();
    let lambdas = [tr * 0.5 + disc, tr * 0.5 - disc];
    // Eigenvector of λ: (m01, λ − m00) or (λ − m11, m10), whichever is larger.
    let a_weight = |l: C64| {
        let v1 = [m[(0, 1)], l - m[(0, 0)]];
        let v2 = [l - m[(1, 1)], m[(1, 0)]];
        let v = if v1[0].norm_sqr() + v1[1].norm_sqr() >= v2[0].norm_sqr() + v2[1].norm_sqr() {
            v1
        } else {
            v2
        };
        let n = v[0].norm_sqr() + v[1].norm_sqr();
        if n == 0.0 {
            0.5
        } else {
            v[0].norm_sqr() / n
        }
    };
    let (la, lb) = if a_weight(lambdas[0]) >= a_weight(lambdas[1]) {
        (lambdas[0], lambdas[1])
    } else {
        (lambdas[1], lambdas[0])
    };
    Ok(PhaseRelation {
        gamma_a: la.arg(),
        gamma_b: lb.arg(),
    })
}
