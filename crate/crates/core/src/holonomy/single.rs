//! One logical qubit in the single-excitation subspace of three transmons.
//!
//! Factor order is `(a, 1, 2)`: ancilla first, then the two data qubits.
//! `|0⟩_L = |10⟩₁₂`, `|1⟩_L = |01⟩₁₂`. The same loop is also compiled on a
//! bare three-level Λ system, and a resonant Rabi pulse serves as the
//! dynamical baseline.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use super::{
    check_loops, logical_channel, rabi_angle, ConditionReport, GateEvaluation, GateRun, PhaseProfile, RabiLoop,
};
use crate::error::{Error, Result};
use crate::metrics::avg_fidelity_channel;
use crate::open_system::{propagate_density, NoiseSpec};
use crate::qdyn::{
    c, evolve_piecewise, local, phase, projector, tensor, CMatrix, DensityMatrix, HilbertSpace, Operator,
    PulseSchedule, StateVector, C64,
};

/// Default SR-NHQC gate time in ns.
pub const DEFAULT_TAU_NS: f64 = 100.0;

/// Three-qubit DFS encoding, factor order `(a, 1, 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLogicalEncoding {
    space: HilbertSpace,
}

impl Default for SingleLogicalEncoding {
    fn default() -> Self {
        Self::new()
    }
}

impl SingleLogicalEncoding {
    pub fn new() -> Self {
        Self {
            space: HilbertSpace::qubits(3).expect("three qubits"),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn ket(&self, levels: [usize; 3]) -> StateVector {
        StateVector::basis(&self.space, &levels).expect("valid levels")
    }

    pub fn zero_l(&self) -> StateVector {
        self.ket([0, 1, 0])
    }

    pub fn one_l(&self) -> StateVector {
        self.ket([0, 0, 1])
    }

    /// `|100⟩`.
    pub fn a1(&self) -> StateVector {
        self.ket([1, 0, 0])
    }

    /// `|011⟩`.
    pub fn a2(&self) -> StateVector {
        self.ket([0, 1, 1])
    }

    /// Basis indices of `|0⟩_L, |1⟩_L`.
    pub fn logical_indices(&self) -> [usize; 2] {
        [2, 1]
    }

    pub fn s1_basis(&self) -> Vec<StateVector> {
        vec![self.ket([0, 0, 1]), self.ket([0, 1, 0]), self.ket([1, 0, 0])]
    }

    pub fn s2_basis(&self) -> Vec<StateVector> {
        vec![self.ket([0, 1, 1]), self.ket([1, 0, 1]), self.ket([1, 1, 0])]
    }

    pub fn computational_basis(&self) -> Vec<StateVector> {
        vec![self.zero_l(), self.one_l()]
    }

    pub fn s1_projector(&self) -> Operator {
        projector(&self.s1_basis()).expect("orthonormal")
    }

    pub fn s2_projector(&self) -> Operator {
        projector(&self.s2_basis()).expect("orthonormal")
    }

    /// `|0⟩_a ⊗ ψ_L`.
    pub fn embed_logical(&self, psi: &StateVector) -> Result<StateVector> {
        embed_state(&self.space, &self.logical_indices(), psi)
    }
}

pub(crate) fn embed_state(space: &HilbertSpace, indices: &[usize], psi: &StateVector) -> Result<StateVector> {
    if psi.space().total_dim() != indices.len() {
        return Err(Error::DimensionMismatch {
            expected: indices.len(),
            found: psi.space().total_dim(),
        });
    }
    let mut amps = vec![c(0.0, 0.0); space.total_dim()];
    for (k, &i) in indices.iter().enumerate() {
        amps[i] = psi.amplitude(k);
    }
    StateVector::from_amplitudes(space.clone(), &amps)
}

/// `(θ, φ, γ)` holonomy parameters plus timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub theta: f64,
    pub phi: f64,
    /// Holonomy angle: the target is `e^{iγ}|b><b| + |d><d|`.
    pub gamma: f64,
    pub tau: f64,
    /// Coupling magnitude in rad/ns.
    pub g_peak: f64,
}

impl GateParams {
    /// Parameters with `g = 2π/τ`.
    pub fn new(theta: f64, phi: f64, gamma: f64, tau: f64) -> Result<Self> {
        let p = Self {
            theta,
            phi,
            gamma,
            tau,
            g_peak: TAU / tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn not(tau: f64) -> Result<Self> {
        Self::new(PI / 2.0, 0.0, PI, tau)
    }

    pub fn hadamard(tau: f64) -> Result<Self> {
        Self::new(PI / 4.0, 0.0, PI, tau)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!("theta = {} outside [0, π]", self.theta)));
        }
        if !self.phi.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("non-finite phase".into()));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau = {}", self.tau)));
        }
        if !(self.g_peak > 0.0) || !self.g_peak.is_finite() {
            return Err(Error::InvalidParameter(format!("g_peak = {}", self.g_peak)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    SrNhqcDfs,
    SrNhqcBare,
    NhqcDfs,
    NhqcBare,
    DgBare,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::SrNhqcDfs,
        ProtocolKind::SrNhqcBare,
        ProtocolKind::NhqcDfs,
        ProtocolKind::NhqcBare,
        ProtocolKind::DgBare,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolKind::SrNhqcDfs => "SR_NHQC_DFS",
            ProtocolKind::SrNhqcBare => "SR_NHQC_BARE",
            ProtocolKind::NhqcDfs => "NHQC_DFS",
            ProtocolKind::NhqcBare => "NHQC_BARE",
            ProtocolKind::DgBare => "DG_BARE",
        }
    }

    pub fn is_dfs(&self) -> bool {
        matches!(self, ProtocolKind::SrNhqcDfs | ProtocolKind::NhqcDfs)
    }

    pub fn is_super_robust(&self) -> bool {
        matches!(self, ProtocolKind::SrNhqcDfs | ProtocolKind::SrNhqcBare)
    }

    pub fn is_holonomic(&self) -> bool {
        !matches!(self, ProtocolKind::DgBare)
    }

    /// Hilbert space the kind's schedules act on.
    pub fn space(&self) -> HilbertSpace {
        match self {
            ProtocolKind::SrNhqcDfs | ProtocolKind::NhqcDfs => SingleLogicalEncoding::new().space,
            ProtocolKind::SrNhqcBare | ProtocolKind::NhqcBare => lambda_space(),
            ProtocolKind::DgBare => HilbertSpace::qubits(1).expect("one qubit"),
        }
    }

    /// Basis indices of `|0⟩_L, |1⟩_L` in [`ProtocolKind::space`].
    pub fn logical_indices(&self) -> [usize; 2] {
        if self.is_dfs() {
            SingleLogicalEncoding::new().logical_indices()
        } else {
            [0, 1]
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown protocol '{s}'")))
    }
}

/// Dressed states of the three-qubit encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedBasis {
    pub b1: StateVector,
    pub d1: StateVector,
    pub b2: StateVector,
    pub d2: StateVector,
    pub a1: StateVector,
    pub a2: StateVector,
}

impl DressedBasis {
    pub fn as_array(&self) -> [&StateVector; 6] {
        [&self.b1, &self.d1, &self.b2, &self.d2, &self.a1, &self.a2]
    }
}

/// `a·x + b·y`.
pub(crate) fn mix(a: C64, x: &StateVector, b: C64, y: &StateVector) -> StateVector {
    StateVector::combination(&[(a, x), (b, y)]).expect("same space")
}

pub fn dressed_basis(theta: f64, phi: f64, enc: &SingleLogicalEncoding) -> DressedBasis {
    let (s, co) = (0.5 * theta).sin_cos();
    let l0 = enc.zero_l();
    let l1 = enc.one_l();
    let l0_up = enc.ket([1, 1, 0]);
    let l1_up = enc.ket([1, 0, 1]);
    DressedBasis {
        b1: mix(c(co, 0.0), &l0, phase(-phi) * s, &l1),
        d1: mix(c(co, 0.0), &l1, -phase(phi) * s, &l0),
        b2: mix(c(co, 0.0), &l1_up, phase(phi) * s, &l0_up),
        d2: mix(c(s, 0.0), &l1_up, -phase(phi) * co, &l0_up),
        a1: enc.a1(),
        a2: enc.a2(),
    }
}

/// DFS control Hamiltonian at a fixed phase `φ'₁`:
/// `g cos(θ/2)e^{−iφ'₁}σ₁⁺σₐ⁻ + g sin(θ/2)e^{−i(φ'₁+φ)}σ₂⁺σₐ⁻ + h.c.`
pub fn control_hamiltonian_at(params: &GateParams, phase1: f64) -> Result<Operator> {
    let enc = SingleLogicalEncoding::new();
    let (s, co) = (0.5 * params.theta).sin_cos();
    let a_down = local::sigma_minus();
    let up = local::sigma_plus();
    let id = local::identity(2);
    let t1 = tensor(&[a_down.clone(), up.clone(), id.clone()])?;
    let t2 = tensor(&[a_down, id, up])?;
    let half = t1.scaled(phase(-phase1) * (params.g_peak * co))
        + t2.scaled(phase(-(phase1 + params.phi)) * (params.g_peak * s));
    let h = &half + &half.dagger();
    debug_assert_eq!(h.space(), enc.space());
    Ok(h)
}

/// [`control_hamiltonian_at`] with the phase read from `profile` at time `t`.
pub fn control_hamiltonian(params: &GateParams, profile: &PhaseProfile, t: f64) -> Result<Operator> {
    control_hamiltonian_at(params, profile.value_at(t))
}

fn lambda_space() -> HilbertSpace {
    HilbertSpace::new(vec![3]).expect("qutrit")
}

/// Bare Λ system `{|0⟩, |1⟩, |e⟩}`: `g(e^{−iφ'₁}|b><e| + h.c.)` with
/// `|b⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{−iφ}|1⟩`.
pub fn lambda_hamiltonian_at(params: &GateParams, phase1: f64) -> Result<Operator> {
    let space = lambda_space();
    let (bright, _, aux) = lambda_states(params.theta, params.phi);
    let half = Operator::ket_bra(&bright, &aux)?.scaled(phase(-phase1) * params.g_peak);
    let h = &half + &half.dagger();
    debug_assert_eq!(h.space(), &space);
    Ok(h)
}

/// `(bright, dark, excited)` of the bare Λ system.
pub fn lambda_states(theta: f64, phi: f64) -> (StateVector, StateVector, StateVector) {
    let space = lambda_space();
    let k = |n: usize| StateVector::basis(&space, &[n]).expect("level");
    let (s, co) = (0.5 * theta).sin_cos();
    let bright = mix(c(co, 0.0), &k(0), phase(-phi) * s, &k(1));
    let dark = mix(c(co, 0.0), &k(1), -phase(phi) * s, &k(0));
    (bright, dark, k(2))
}

/// Staircase `0, s, 0, s` on the quarters of `[0, τ]`.
pub fn sr_phase_profile(step: f64, tau: f64) -> Result<PhaseProfile> {
    PhaseProfile::staircase(&[0.0, step, 0.0, step], tau)
}

/// Two-segment loop `0, π − γ` on the halves of `[0, duration]`.
pub fn nhqc_phase_profile(gamma: f64, duration: f64) -> Result<PhaseProfile> {
    PhaseProfile::staircase(&[0.0, PI - gamma], duration)
}

/// Phase profile a holonomic kind compiles `params` with; `None` for the
/// dynamical baseline.
///
/// The super-robust staircase uses step `−γ/2` over `τ` (a double loop,
/// `Ω(τ) = 4π`); the conventional loop runs for `τ/2` (`Ω = 2π`).
pub fn gate_profile(kind: ProtocolKind, params: &GateParams) -> Result<Option<PhaseProfile>> {
    params.validate()?;
    Ok(match kind {
        ProtocolKind::SrNhqcDfs | ProtocolKind::SrNhqcBare => {
            Some(sr_phase_profile(-0.5 * params.gamma, params.tau)?)
        }
        ProtocolKind::NhqcDfs | ProtocolKind::NhqcBare => {
            Some(nhqc_phase_profile(params.gamma, 0.5 * params.tau)?)
        }
        ProtocolKind::DgBare => None,
    })
}

/// Resonant Rabi pulse `H = (Ω_R/2) n·σ` with
/// `n = (sinθ cosφ, sinθ sinφ, cosθ)` and `Ω_R = angle/τ`.
pub fn dg_schedule(theta: f64, phi: f64, rotation_angle: f64, tau: f64) -> Result<PulseSchedule> {
    if !(rotation_angle > 0.0 && rotation_angle <= TAU) {
        return Err(Error::InvalidParameter(format!(
            "rotation angle {rotation_angle} outside (0, 2π]"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau}")));
    }
    let rate = rotation_angle / tau;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let h = local::pauli_x().scaled_real(st * cp)
        + local::pauli_y().scaled_real(st * sp)
        + local::pauli_z().scaled_real(ct);
    PulseSchedule::from_pairs(vec![(h.scaled_real(0.5 * rate), tau)])
}

/// Pulse schedule for `kind` realizing `target_unitary(θ, φ, γ)` at `δ = 0`.
pub fn compile_gate(kind: ProtocolKind, params: &GateParams) -> Result<PulseSchedule> {
    params.validate()?;
    match gate_profile(kind, params)? {
        Some(profile) if kind.is_dfs() => profile.compile(|p| control_hamiltonian_at(params, p)),
        Some(profile) => profile.compile(|p| lambda_hamiltonian_at(params, p)),
        None => {
            let angle = params.gamma.rem_euclid(TAU);
            if angle == 0.0 {
                return Err(Error::Unsupported(
                    "dynamical gate with zero rotation angle".into(),
                ));
            }
            dg_schedule(PI - params.theta, PI - params.phi, angle, angle / params.g_peak)
        }
    }
}

fn require_space(schedule: &PulseSchedule, kind: ProtocolKind) -> Result<()> {
    let space = kind.space();
    if schedule.space() != &space {
        return Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            found: schedule.space().total_dim(),
        });
    }
    Ok(())
}

/// Logical channel of a compiled schedule under `(1+δ)H` and dephasing.
/// DFS inputs start with the ancilla in `|0⟩_a`.
pub fn run_gate(schedule: &PulseSchedule, kind: ProtocolKind, noise: &NoiseSpec) -> Result<GateRun> {
    require_space(schedule, kind)?;
    logical_channel(
        schedule,
        &kind.logical_indices(),
        &HilbertSpace::qubits(1)?,
        noise,
    )
}

/// Compiles, runs and scores a single-qubit gate against
/// [`target_unitary`].
pub fn evaluate_gate(kind: ProtocolKind, params: &GateParams, noise: &NoiseSpec) -> Result<GateEvaluation> {
    let schedule = compile_gate(kind, params)?;
    let run = run_gate(&schedule, kind, noise)?;
    let fidelity = avg_fidelity_channel(&run.channel, &target_unitary(params.theta, params.phi, params.gamma))?;
    Ok(GateEvaluation { run, fidelity })
}

/// `e^{iγ/2} e^{−iγ n₁·σᴸ/2}` with `n₁ = (−sinθ cosφ, −sinθ sinφ, cosθ)`.
///
/// The logical Paulis are built from ket-bras of `|0⟩_L = |10⟩`,
/// `|1⟩_L = |01⟩`, which in `(|0⟩_L, |1⟩_L)` order reads
/// `σxᴸ = σx`, `σyᴸ = −σy`, `σzᴸ = −σz`. The result equals
/// `e^{iγ}|b><b| + |d><d|`.
pub fn target_unitary(theta: f64, phi: f64, gamma: f64) -> Operator {
    let n = [-theta.sin() * phi.cos(), -theta.sin() * phi.sin(), theta.cos()];
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
    let (sg, cg) = (0.5 * gamma).sin_cos();
    let rot = local::identity(2).scaled_real(cg) + n_sigma.scaled(c(0.0, -sg));
    rot.scaled(phase(0.5 * gamma))
}

/// Holonomy angle realized by a logical unitary: `arg(<b|U|b> / <d|U|d>)`.
pub fn realized_holonomy_angle(u: &CMatrix, theta: f64, phi: f64) -> f64 {
    let (s, co) = (0.5 * theta).sin_cos();
    let b = nalgebra::DVector::from_vec(vec![c(co, 0.0), phase(-phi) * s]);
    let d = nalgebra::DVector::from_vec(vec![-phase(phi) * s, c(co, 0.0)]);
    let ub = (b.adjoint() * u * &b)[(0, 0)];
    let ud = (d.adjoint() * u * &d)[(0, 0)];
    (ub / ud).arg()
}

/// `γ_b1(t)` accumulated along the profile, from the phase jumps.
pub fn geometric_phase(params: &GateParams, profile: &PhaseProfile, t: f64) -> f64 {
    let enc = SingleLogicalEncoding::new();
    let basis = dressed_basis(params.theta, params.phi, &enc);
    block_loops(&basis)[0].geometric_phase(profile, params.g_peak, t)
}

/// Ancillary states `μ_k(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaryStates {
    pub mu_d1: StateVector,
    pub mu_b1: StateVector,
    pub mu_a1: StateVector,
    pub mu_d2: StateVector,
    pub mu_b2: StateVector,
    pub mu_a2: StateVector,
}

fn block_loops(basis: &DressedBasis) -> [RabiLoop; 2] {
    [
        RabiLoop {
            bright: basis.b1.clone(),
            aux: basis.a1.clone(),
            sign: 1.0,
        },
        RabiLoop {
            bright: basis.b2.clone(),
            aux: basis.a2.clone(),
            sign: -1.0,
        },
    ]
}

pub fn ancillary_states(params: &GateParams, profile: &PhaseProfile, t: f64) -> AncillaryStates {
    let enc = SingleLogicalEncoding::new();
    let basis = dressed_basis(params.theta, params.phi, &enc);
    let [l1, l2] = block_loops(&basis);
    let omega = rabi_angle(params.g_peak, t);
    let phi = profile.value_at(t);
    let (mu_b1, mu_a1) = l1.ancillary(omega, phi);
    let (mu_b2, mu_a2) = l2.ancillary(omega, phi);
    AncillaryStates {
        mu_d1: basis.d1,
        mu_b1,
        mu_a1,
        mu_d2: basis.d2,
        mu_b2,
        mu_a2,
    }
}

/// Cyclicity, parallel transport and SR integral for the DFS loop.
pub fn verify_conditions(params: &GateParams, profile: &PhaseProfile) -> Result<ConditionReport> {
    params.validate()?;
    let enc = SingleLogicalEncoding::new();
    let basis = dressed_basis(params.theta, params.phi, &enc);
    check_loops(
        &block_loops(&basis),
        &[basis.d1.clone(), basis.d2.clone()],
        profile,
        params.g_peak,
        |p| control_hamiltonian_at(params, p),
    )
}

/// Logical populations sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub pop_0l: Vec<f64>,
    pub pop_1l: Vec<f64>,
}

/// Populations of `|0⟩_L`, `|1⟩_L` at `grid` uniformly spaced times in
/// `[0, τ]` starting from the logical state `psi0`.
pub fn population_trace(
    schedule: &PulseSchedule,
    kind: ProtocolKind,
    psi0: &StateVector,
    grid: usize,
    noise: &NoiseSpec,
) -> Result<PopulationTrace> {
    require_space(schedule, kind)?;
    psi0.require_normalized()?;
    noise.validate()?;
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("trace grid {grid} < 2")));
    }
    let idx = kind.logical_indices();
    let space = kind.space();
    let full0 = embed_state(&space, &idx, psi0)?;
    let rho0 = DensityMatrix::from_pure(&full0);
    let scaled = schedule.scaled(noise.gce_factor());
    let tau = scaled.total_duration();
    let mut out = PopulationTrace {
        times: Vec::with_capacity(grid),
        pop_0l: Vec::with_capacity(grid),
        pop_1l: Vec::with_capacity(grid),
    };
    for k in 0..grid {
        let t = tau * k as f64 / (grid - 1) as f64;
        let (p0, p1) = match scaled.truncated(t) {
            None => (full0.population(idx[0]), full0.population(idx[1])),
            Some(part) if noise.gamma_phi() == 0.0 => {
                let (psi, _) = evolve_piecewise(&part, &full0)?;
                (psi.population(idx[0]), psi.population(idx[1]))
            }
            Some(part) => {
                let rho = propagate_density(&part, &rho0, noise)?;
                (rho.population(idx[0]), rho.population(idx[1]))
            }
        };
        out.times.push(t);
        out.pop_0l.push(p0);
        out.pop_1l.push(p1);
    }
    Ok(out)
}
