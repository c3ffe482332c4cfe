//! Holonomic gate construction shared by the one- and two-logical-qubit
//! encodings: piecewise phase profiles, the Rabi-loop parametrization of
//! the ancillary states, condition checks and logical channel extraction.
//!
//! Every loop here is driven by `H = g(e^{−iσφ(t)}|b><a| + h.c.)` with
//! constant `g` and `σ = ±1`. The pulse area is the Rabi angle
//! `Ω(t) = 2∫₀ᵗ g`, so `|b⟩` is fully transferred to `|a⟩` at `Ω = π`.

pub mod single;
pub mod two;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::FidelityReport;
use crate::open_system::{DensityPropagator, NoiseSpec, Superoperator};
use crate::qdyn::{c, max_abs, phase, propagator, CMatrix, HilbertSpace, Operator, PulseSchedule, StateVector};
use crate::tol;

pub use single::*;
pub use two::*;

/// Grid used for the parallel-transport scan and the coarse SR quadrature.
pub const CONDITION_GRID: usize = 1024;
/// Refined SR quadrature grid.
pub const CONDITION_GRID_FINE: usize = 16 * CONDITION_GRID;

/// Piecewise-constant phase `φ(t)`; interval `k` is `(t_k, t_{k+1}]`, the
/// first one closed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PhaseProfile {
    /// `breakpoints` runs from 0 to the total duration and has one more
    /// entry than `values`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidSchedule(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidSchedule("profile must start at t = 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidSchedule(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSchedule("non-finite phase value".into()));
        }
        Ok(Self { breakpoints, values })
    }

    /// Equal-length intervals with the given values.
    pub fn staircase(values: &[f64], duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::InvalidSchedule(format!("duration = {duration}")));
        }
        let n = values.len();
        let breakpoints = (0..=n).map(|k| duration * k as f64 / n as f64).collect();
        Self::new(breakpoints, values.to_vec())
    }

    pub fn constant(value: f64, duration: f64) -> Result<Self> {
        Self::staircase(&[value], duration)
    }

    pub fn duration(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.breakpoints[1..]
            .iter()
            .position(|&end| t <= end)
            .unwrap_or(self.values.len() - 1);
        self.values[k]
    }

    /// `(start, end, value)` per interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.breakpoints[k], self.breakpoints[k + 1], v))
    }

    /// Interior jumps `(t_k, φ_k − φ_{k−1})`.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..self.values.len()).map(|k| (self.breakpoints[k], self.values[k] - self.values[k - 1]))
    }

    /// Piecewise-constant schedule with `hamiltonian(φ)` on every interval.
    pub fn compile<F>(&self, mut hamiltonian: F) -> Result<PulseSchedule>
    where
        F: FnMut(f64) -> Result<Operator>,
    {
        let pairs = self
            .intervals()
            .map(|(a, b, v)| Ok((hamiltonian(v)?, b - a)))
            .collect::<Result<Vec<_>>>()?;
        PulseSchedule::from_pairs(pairs)
    }
}

/// Outcome of the holonomy condition checks. Reports, never errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// Largest projector distance between an ancillary state at the end of
    /// the loop and at its start.
    pub cyclicity_defect: f64,
    /// Largest `|<μ_k|H|μ_k>|` on the time grid.
    pub parallel_transport_defect: f64,
    /// `|∫ g e^{i(2γ_b + σφ)} dt| / (gτ)` on the coarse grid.
    pub sr_defect: f64,
    /// Same integral on the refined grid.
    pub sr_defect_refined: f64,
}

impl ConditionReport {
    pub fn cyclic(&self) -> bool {
        self.cyclicity_defect < tol::GEOMETRIC_DEFECT
    }

    pub fn parallel_transported(&self) -> bool {
        self.parallel_transport_defect < tol::GEOMETRIC_DEFECT
    }

    pub fn super_robust(&self) -> bool {
        self.sr_defect < tol::SR_DEFECT && self.sr_defect_refined < tol::SR_DEFECT
    }

    /// Difference between the two quadrature resolutions.
    pub fn quadrature_gap(&self) -> f64 {
        (self.sr_defect - self.sr_defect_refined).abs()
    }

    pub fn all_pass(&self) -> bool {
        self.cyclic() && self.parallel_transported() && self.super_robust()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(
            f,
            "cyclicity          {:.3e}  {}",
            self.cyclicity_defect,
            mark(self.cyclic())
        )?;
        writeln!(
            f,
            "parallel transport {:.3e}  {}",
            self.parallel_transport_defect,
            mark(self.parallel_transported())
        )?;
        write!(
            f,
            "super-robustness   {:.3e} (refined {:.3e})  {}",
            self.sr_defect,
            self.sr_defect_refined,
            mark(self.super_robust())
        )
    }
}

/// Bright/auxiliary pair of one Rabi loop, `H = g(e^{−iσφ}|b><a| + h.c.)`.
#[derive(Debug, Clone)]
pub(crate) struct RabiLoop {
    pub bright: StateVector,
    pub aux: StateVector,
    pub sign: f64,
}

/// `Ω(t) = 2gt`.
pub fn rabi_angle(g: f64, t: f64) -> f64 {
    2.0 * g * t
}

impl RabiLoop {
    /// `(μ_b, μ_a)` at Rabi angle `omega` and phase `phi`:
    /// `μ_b = cos(Ω/2)b − i sin(Ω/2)e^{iσφ}a`,
    /// `μ_a = −i sin(Ω/2)e^{−iσφ}b + cos(Ω/2)a`.
    pub fn ancillary(&self, omega: f64, phi: f64) -> (StateVector, StateVector) {
        let (s, co) = (0.5 * omega).sin_cos();
        let e = phase(self.sign * phi);
        let mu_b = StateVector::combination(&[
            (c(co, 0.0), &self.bright),
            (c(0.0, -s) * e, &self.aux),
        ])
        .expect("loop states share a space");
        let mu_a = StateVector::combination(&[
            (c(0.0, -s) * e.conj(), &self.bright),
            (c(co, 0.0), &self.aux),
        ])
        .expect("loop states share a space");
        (mu_b, mu_a)
    }

    /// `γ_b(t) = −Σ sin²(Ω(t_j)/2) σΔφ_j` over the jumps before `t`.
    pub fn geometric_phase(&self, profile: &PhaseProfile, g: f64, t: f64) -> f64 {
        -profile
            .jumps()
            .filter(|&(tj, _)| tj < t)
            .map(|(tj, dphi)| (0.5 * rabi_angle(g, tj)).sin().powi(2) * self.sign * dphi)
            .sum::<f64>()
    }
}

fn projector_distance(a: &StateVector, b: &StateVector) -> f64 {
    max_abs(&(a.outer() - b.outer()))
}

/// Condition report for a set of Rabi loops sharing one profile and one
/// coupling; the SR integral is evaluated for the first loop.
pub(crate) fn check_loops<F>(
    loops: &[RabiLoop],
    darks: &[StateVector],
    profile: &PhaseProfile,
    g: f64,
    mut hamiltonian: F,
) -> Result<ConditionReport>
where
    F: FnMut(f64) -> Result<Operator>,
{
    let tau = profile.duration();
    let (phi0, phi_end) = (profile.value_at(0.0), profile.value_at(tau));
    let omega_end = rabi_angle(g, tau);

    let mut cyclicity: f64 = 0.0;
    for lp in loops {
        let (b0, a0) = lp.ancillary(0.0, phi0);
        let (b1, a1) = lp.ancillary(omega_end, phi_end);
        cyclicity = cyclicity
            .max(projector_distance(&b0, &b1))
            .max(projector_distance(&a0, &a1));
    }

    let mut transport: f64 = 0.0;
    let dt = tau / CONDITION_GRID as f64;
    for m in 0..CONDITION_GRID {
        let t = (m as f64 + 0.5) * dt;
        let phi = profile.value_at(t);
        let h = hamiltonian(phi)?;
        let omega = rabi_angle(g, t);
        for lp in loops {
            let (mu_b, mu_a) = lp.ancillary(omega, phi);
            transport = transport
                .max(h.element(&mu_b, &mu_b).norm())
                .max(h.element(&mu_a, &mu_a).norm());
        }
        for d in darks {
            transport = transport.max(h.element(d, d).norm());
        }
    }

    let sr = |n: usize| -> f64 {
        let Some(lp) = loops.first() else { return 0.0 };
        let dt = tau / n as f64;
        let mut acc = c(0.0, 0.0);
        for m in 0..n {
            let t = (m as f64 + 0.5) * dt;
            let gamma = lp.geometric_phase(profile, g, t);
            acc += phase(2.0 * gamma + lp.sign * profile.value_at(t)) * (g * dt);
        }
        acc.norm() / (g * tau)
    };

    Ok(ConditionReport {
        cyclicity_defect: cyclicity,
        parallel_transport_defect: transport,
        sr_defect: sr(CONDITION_GRID),
        sr_defect_refined: sr(CONDITION_GRID_FINE),
    })
}

/// Logical-block channel of a gate and its integrity diagnostics.
#[derive(Debug, Clone)]
pub struct GateRun {
    /// Channel restricted to the logical subspace (trace-decreasing if the
    /// gate leaks).
    pub channel: Superoperator,
    /// Average trace lost from the logical subspace.
    pub leakage: f64,
    /// Trace-preservation defect of the full-space evolution.
    pub trace_defect: f64,
    /// Smallest Choi eigenvalue of the logical block.
    pub min_choi_eigenvalue: f64,
}

/// Runs an already-compiled schedule under `(1+δ)` scaling and dephasing and
/// extracts the block acting on the basis states `logical`.
pub(crate) fn logical_channel(
    schedule: &PulseSchedule,
    logical: &[usize],
    logical_space: &HilbertSpace,
    noise: &NoiseSpec,
) -> Result<GateRun> {
    noise.validate()?;
    let k = logical.len();
    debug_assert_eq!(k, logical_space.total_dim());
    let scaled = schedule.scaled(noise.gce_factor());

    let (matrix, trace_defect) = if noise.gamma_phi() == 0.0 {
        let u = propagator(&scaled);
        let block = u.restricted(logical);
        (block.conjugate().kronecker(&block), u.unitarity_defect())
    } else {
        let d = schedule.space().total_dim();
        let mut prop = DensityPropagator::new(&scaled, noise)?;
        let mut s = CMatrix::zeros(k * k, k * k);
        let mut drift: f64 = 0.0;
        for c2 in 0..k {
            for c1 in 0..k {
                let mut unit = CMatrix::zeros(d, d);
                unit[(logical[c1], logical[c2])] = c(1.0, 0.0);
                let out = prop.apply(&unit);
                let expected = if c1 == c2 { 1.0 } else { 0.0 };
                drift = drift.max((out.trace() - c(expected, 0.0)).norm());
                for r2 in 0..k {
                    for r1 in 0..k {
                        s[(r1 + k * r2, c1 + k * c2)] = out[(logical[r1], logical[r2])];
                    }
                }
            }
        }
        (s, drift)
    };

    if trace_defect > tol::TRACE_ABORT {
        return Err(Error::TraceDrift { drift: trace_defect });
    }
    let channel = Superoperator::new(logical_space.clone(), matrix)?;
    let min_choi_eigenvalue = channel.require_completely_positive()?;
    let leakage = (1.0 - channel.mean_trace_retained()).max(0.0);
    if leakage > tol::LEAKAGE_ABORT {
        return Err(Error::Leakage { leakage });
    }
    Ok(GateRun {
        channel,
        leakage,
        trace_defect,
        min_choi_eigenvalue,
    })
}

/// A gate run scored against its target.
#[derive(Debug, Clone)]
pub struct GateEvaluation {
    pub run: GateRun,
    pub fidelity: FidelityReport,
}

/// Compiles `gate` for `kind` at gate time `tau`, runs it under `noise` and
/// scores it. The CNOT supports only the two DFS holonomic kinds.
pub fn evaluate(gate: GateName, kind: ProtocolKind, tau: f64, noise: &NoiseSpec) -> Result<GateEvaluation> {
    match gate {
        GateName::Cnot => evaluate_cnot(kind, tau, noise),
        _ => {
            let (theta, phi, gamma) = gate.angles();
            evaluate_gate(kind, &GateParams::new(theta, phi, gamma, tau)?, noise)
        }
    }
}

/// Named gates with their standard holonomy parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateName {
    Not,
    Hadamard,
    Cnot,
}

impl GateName {
    pub const ALL: [GateName; 3] = [GateName::Not, GateName::Hadamard, GateName::Cnot];

    pub fn as_str(&self) -> &'static str {
        match self {
            GateName::Not => "not",
            GateName::Hadamard => "hadamard",
            GateName::Cnot => "cnot",
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateName::Cnot)
    }

    /// `(θ, φ, γ)`.
    pub fn angles(&self) -> (f64, f64, f64) {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
        match self {
            GateName::Not | GateName::Cnot => (FRAC_PI_2, 0.0, PI),
            GateName::Hadamard => (FRAC_PI_4, 0.0, PI),
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "not" | "x" => Ok(GateName::Not),
            "hadamard" | "h" => Ok(GateName::Hadamard),
            "cnot" | "cx" => Ok(GateName::Cnot),
            other => Err(Error::InvalidParameter(format!("unknown gate '{other}'"))),
        }
    }
}
