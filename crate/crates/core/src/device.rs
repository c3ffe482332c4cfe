//! Transmon pair under parametric frequency modulation.
//!
//! Two-level truncation with the excitation convention
//! `σ_z = |1><1| − |0><0|`, so `H₀ = Σ ω_m(t) σ_z⁽ᵐ⁾ / 2` puts `|1⟩` above `|0⟩`.
//! Qubit 1 carries the modulation `ω₁(t) = ω₁ + ε sin(νt + φ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::qdyn::{c, hermitian_exp, local, max_abs, tensor, CMatrix, Operator, C64};

/// Largest argument accepted by [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 50.0;
const SERIES_MAX_ARG: f64 = 12.0;

/// Bessel function of the first kind `J_n(x)` for `|x| ≤ 50`.
///
/// Power series up to `|x| = 12`, Miller's downward recurrence beyond.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > BESSEL_MAX_ARG {
        return Err(Error::OutOfRange {
            x,
            limit: BESSEL_MAX_ARG,
        });
    }
    let value = if x.abs() <= SERIES_MAX_ARG {
        bessel_series(n, x)
    } else {
        let v = bessel_miller(n, x.abs());
        if x < 0.0 && n % 2 == 1 {
            -v
        } else {
            v
        }
    };
    Ok(value)
}

fn bessel_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k as f64 > half.abs() {
            break;
        }
        if k > 200 {
            break;
        }
    }
    sum
}

fn bessel_miller(n: u32, x: f64) -> f64 {
    let top = n.max(x.ceil() as u32) + 60;
    let start = top + top % 2;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        if k == n {
            wanted = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    // cur now holds J_0.
    norm += cur;
    if n == 0 {
        wanted = cur;
    }
    wanted / norm
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonSpec {
    /// Qubit frequency in rad/ns.
    pub omega: f64,
    /// Anharmonicity in rad/ns.
    pub alpha: f64,
    pub levels: usize,
}

impl TransmonSpec {
    pub fn new(omega: f64, alpha: f64, levels: usize) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega = {omega}")));
        }
        if !(2..=3).contains(&levels) {
            return Err(Error::InvalidParameter(format!("levels = {levels}")));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
        }
        Ok(Self {
            omega,
            alpha,
            levels,
        })
    }

    pub fn qubit(omega: f64) -> Result<Self> {
        Self::new(omega, 0.0, 2)
    }
}

/// `ω(t) = ω + ε sin(νt + φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec {
    pub epsilon: f64,
    pub nu: f64,
    pub phase: f64,
}

impl ModulationSpec {
    pub fn new(epsilon: f64, nu: f64, phase: f64) -> Result<Self> {
        if nu == 0.0 || !nu.is_finite() || !epsilon.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "modulation (epsilon = {epsilon}, nu = {nu}, phase = {phase})"
            )));
        }
        Ok(Self {
            epsilon,
            nu,
            phase,
        })
    }

    /// Modulation with a given index `β = ε/ν`.
    pub fn with_beta(beta: f64, nu: f64, phase: f64) -> Result<Self> {
        Self::new(beta * nu, nu, phase)
    }

    pub fn beta(&self) -> f64 {
        self.epsilon / self.nu
    }

    /// `∫₀ᵗ ε sin(νs + φ) ds`.
    pub fn integrated_shift(&self, t: f64) -> f64 {
        -self.beta() * ((self.nu * t + self.phase).cos() - self.phase.cos())
    }
}

/// Static exchange coupling `g₁₂`; the reverse direction is `conj(g₁₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    pub g: C64,
}

impl CouplingSpec {
    pub fn new(g: C64) -> Self {
        Self { g }
    }

    pub fn real(g: f64) -> Self {
        Self { g: c(g, 0.0) }
    }

    pub fn reversed(&self) -> Self {
        Self { g: self.g.conj() }
    }
}

/// `g' = g J₁(β) e^{−i(φ + π/2)}`.
pub fn effective_coupling(g: C64, modulation: &ModulationSpec) -> Result<C64> {
    let j1 = bessel_j(1, modulation.beta())?;
    Ok(g * j1 * C64::from_polar(1.0, -(modulation.phase + FRAC_PI_2)))
}

fn excitation_z() -> Operator {
    local::pauli_z().scaled_real(-1.0)
}

/// Lab-frame `H₀(t) + H₁₂` on two qubits (first factor is the modulated one).
pub fn lab_frame_pair_hamiltonian(
    q1: &TransmonSpec,
    q2: &TransmonSpec,
    coupling: &CouplingSpec,
    modulation: &ModulationSpec,
    t: f64,
) -> Result<Operator> {
    let omega1 = q1.omega + modulation.epsilon * (modulation.nu * t + modulation.phase).sin();
    let id = local::identity(2);
    let z = excitation_z();
    let h0 = tensor(&[z.scaled_real(0.5 * omega1), id.clone()])?
        + tensor(&[id, z.scaled_real(0.5 * q2.omega)])?;
    let lower = local::sigma_plus().scaled(coupling.g) + local::sigma_minus().scaled(coupling.g.conj());
    let x2 = local::sigma_plus() + local::sigma_minus();
    Ok(h0 + tensor(&[lower, x2])?)
}

/// Transmon pair with modulated qubit 1, as used by the RWA check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceSpec {
    pub q1: TransmonSpec,
    pub q2: TransmonSpec,
    pub coupling: CouplingSpec,
    pub modulation: ModulationSpec,
}

impl DeviceSpec {
    /// Resonant sideband drive `ν = −Δ` with `Δ = ω₁ − ω₂`.
    pub fn resonant(omega1: f64, omega2: f64, g: f64, beta: f64, phase: f64) -> Result<Self> {
        let nu = omega2 - omega1;
        Ok(Self {
            q1: TransmonSpec::qubit(omega1)?,
            q2: TransmonSpec::qubit(omega2)?,
            coupling: CouplingSpec::real(g),
            modulation: ModulationSpec::with_beta(beta, nu, phase)?,
        })
    }

    pub fn detuning(&self) -> f64 {
        self.q1.omega - self.q2.omega
    }

    pub fn effective_coupling(&self) -> Result<C64> {
        effective_coupling(self.coupling.g, &self.modulation)
    }

    /// `π/|g'|`, or infinity when the effective coupling vanishes.
    pub fn exchange_period(&self) -> Result<f64> {
        let g = self.effective_coupling()?.norm();
        Ok(if g == 0.0 { f64::INFINITY } else { PI / g })
    }

    pub fn lab_hamiltonian(&self, t: f64) -> Result<Operator> {
        lab_frame_pair_hamiltonian(&self.q1, &self.q2, &self.coupling, &self.modulation, t)
    }

    /// Phases `θ_m(t) = ∫₀ᵗ ω_m` of the free evolution.
    pub fn free_phases(&self, t: f64) -> (f64, f64) {
        (
            self.q1.omega * t + self.modulation.integrated_shift(t),
            self.q2.omega * t,
        )
    }

    /// `U₀(t)† H₁₂ U₀(t)` in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn interaction_hamiltonian(&self, t: f64) -> CMatrix {
        let (th1, th2) = self.free_phases(t);
        let g = self.coupling.g;
        let mut h = CMatrix::zeros(4, 4);
        h[(2, 1)] = g * C64::from_polar(1.0, th1 - th2);
        h[(3, 0)] = g * C64::from_polar(1.0, th1 + th2);
        h[(1, 2)] = h[(2, 1)].conj();
        h[(0, 3)] = h[(3, 0)].conj();
        h
    }

    fn max_frequency(&self) -> f64 {
        self.q1.omega.abs() + self.modulation.epsilon.abs() + self.q2.omega.abs()
    }
}

/// Full-model vs effective-model comparison of the `|10⟩ → |01⟩` exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct RwaReport {
    pub times: Vec<f64>,
    pub p_full: Vec<f64>,
    pub p_eff: Vec<f64>,
    /// `max_t |p_full − p_eff|`.
    pub deviation: f64,
    /// Step size of the accepted full-model run.
    pub step: f64,
    pub effective_coupling: C64,
}

/// Fourth-order Magnus step on `[t, t + h]` (two Gauss points).
fn magnus_step(dev: &DeviceSpec, t: f64, h: f64) -> CMatrix {
    let s = 3f64.sqrt() / 6.0;
    let h1 = dev.interaction_hamiltonian(t + h * (0.5 - s));
    let h2 = dev.interaction_hamiltonian(t + h * (0.5 + s));
    let comm = &h2 * &h1 - &h1 * &h2;
    let k = (&h1 + &h2) * c(0.5 * h, 0.0) + comm * c(0.0, -(3f64.sqrt() / 12.0) * h * h);
    hermitian_exp(&k, 1.0)
}

fn full_trajectory(dev: &DeviceSpec, times: &[f64], step: f64) -> (Vec<f64>, CMatrix) {
    let mut u = CMatrix::identity(4, 4);
    let mut t = 0.0;
    let mut pops = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let n = (span / step).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for k in 0..n {
                u = magnus_step(dev, t + k as f64 * h, h) * u;
            }
            t = target;
        }
        pops.push(u[(1, 2)].norm_sqr());
    }
    (pops, u)
}

const RWA_CONVERGENCE: f64 = 1e-8;
const RWA_MAX_HALVINGS: usize = 8;

/// Simulates the full interaction-picture model and the effective exchange
/// `sin²(|g'|t)` from `|10⟩` at `samples` uniformly spaced times in
/// `[0, duration]`.
pub fn rwa_comparison(dev: &DeviceSpec, duration: f64, samples: usize) -> Result<RwaReport> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter(format!("duration = {duration}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("samples = {samples}")));
    }
    let g_eff = dev.effective_coupling()?;
    let times: Vec<f64> = (0..samples)
        .map(|k| duration * k as f64 / (samples - 1) as f64)
        .collect();
    let p_eff: Vec<f64> = times.iter().map(|&t| (g_eff.norm() * t).sin().powi(2)).collect();

    let mut step = 2.0 * PI / (100.0 * dev.max_frequency());
    let (mut pops, mut u) = full_trajectory(dev, &times, step);
    let mut converged = false;
    for _ in 0..RWA_MAX_HALVINGS {
        step *= 0.5;
        let (finer_pops, finer_u) = full_trajectory(dev, &times, step);
        let change = max_abs(&(&finer_u - &u));
        pops = finer_pops;
        u = finer_u;
        if change < RWA_CONVERGENCE {
            converged = true;
            break;
        }
    }
    let unitarity = max_abs(&(u.adjoint() * &u - CMatrix::identity(4, 4)));
    if !converged || unitarity > RWA_CONVERGENCE {
        return Err(Error::StepResolution(format!(
            "full model unresolved at step {step:.3e} ns (unitarity defect {unitarity:.3e})"
        )));
    }
    let deviation = pops
        .iter()
        .zip(&p_eff)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RwaReport {
        times,
        p_full: pops,
        p_eff,
        deviation,
        step,
        effective_coupling: g_eff,
    })
}

/// `max_t |p_full(t) − p_eff(t)|` of [`rwa_comparison`].
pub fn rwa_deviation(dev: &DeviceSpec, duration: f64, samples: usize) -> Result<f64> {
    Ok(rwa_comparison(dev, duration, samples)?.deviation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdyn::{HilbertSpace, StateVector};

    const TWO_PI: f64 = 2.0 * PI;

    /// 30-term alternating series for `J₁`, written independently of the
    /// production code.
    fn j1_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut fact_k = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact_k *= k as f64;
            }
            let fact_k1 = fact_k * (k + 1) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (x / 2.0).powi(2 * k + 1) / (fact_k * fact_k1);
        }
        sum
    }

    #[test]
    fn bessel_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(4, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bessel_matches_reference_values() {
        // Reference values computed with 30-digit arithmetic.
        let cases: [(u32, f64, f64); 11] = [
            (0, 0.5, 0.938_469_807_240_812_904_23),
            (1, 1.0, 0.440_050_585_744_933_515_96),
            (2, 3.7, 0.428_329_656_206_575_865_56),
            (5, 10.0, -0.234_061_528_186_793_640_44),
            (0, 15.0, -0.014_224_472_826_780_773_234),
            (1, 20.0, 0.066_833_124_175_850_045_579),
            (3, 33.3, -0.130_576_780_682_908_357_15),
            (7, 49.0, 0.114_550_384_796_268_428_49),
            (10, 2.0, 2.515_386_282_716_736_709_6e-7),
            (1, 12.0, -0.223_447_104_490_627_612_37),
            (4, -6.5, 0.274_802_730_982_284_532_56),
        ];
        for (n, x, expected) in cases {
            let got = bessel_j(n, x).unwrap();
            assert!((got - expected).abs() < 1e-12, "J_{n}({x}) = {got}, want {expected}");
        }
    }

    #[test]
    fn bessel_j1_matches_series_oracle() {
        for x in [0.1, 1.0, 1.8, 2.5, 4.0] {
            assert!((bessel_j(1, x).unwrap() - j1_oracle(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn bessel_recurrence() {
        for &x in &[0.7, 3.3, 9.9, 11.9, 12.1, 18.0, 27.5, 44.0, 49.9, -8.0, -30.0] {
            for n in 1..15u32 {
                let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn bessel_continuous_across_method_switch() {
        for n in [0, 1, 2, 6] {
            let below = bessel_j(n, 12.0).unwrap();
            let above = bessel_miller(n, 12.0);
            assert!((below - above).abs() < 1e-12);
        }
    }

    #[test]
    fn bessel_rejects_large_arguments() {
        assert!(matches!(bessel_j(1, 50.5), Err(Error::OutOfRange { .. })));
        assert!(bessel_j(1, f64::NAN).is_err());
    }

    #[test]
    fn effective_coupling_cases() {
        let off = ModulationSpec::with_beta(0.0, 1.0, 0.3).unwrap();
        assert_eq!(effective_coupling(c(1.0, 0.0), &off).unwrap().norm(), 0.0);

        let m = ModulationSpec::with_beta(1.0, 2.0, 0.0).unwrap();
        let g = effective_coupling(c(1.0, 0.0), &m).unwrap();
        assert!((g - c(0.0, -j1_oracle(1.0))).norm() < 1e-12);

        let g2 = effective_coupling(c(2.0, 0.0), &m).unwrap();
        assert_eq!(g2.norm(), 2.0 * g.norm());
    }

    #[test]
    fn effective_coupling_peaks_at_first_j1_maximum() {
        let gain = |beta: f64| {
            let m = ModulationSpec::with_beta(beta, 1.0, 0.0).unwrap();
            effective_coupling(c(1.0, 0.0), &m).unwrap().norm()
        };
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.5, 3.0);
        while b - a > 1e-9 {
            let x1 = b - ratio * (b - a);
            let x2 = a + ratio * (b - a);
            if gain(x1) < gain(x2) {
                a = x1;
            } else {
                b = x2;
            }
        }
        assert!((0.5 * (a + b) - 1.841_183_781_340_659_3).abs() < 1e-6);
    }

    #[test]
    fn lab_frame_structure() {
        let q1 = TransmonSpec::qubit(TWO_PI * 4.5).unwrap();
        let q2 = TransmonSpec::qubit(TWO_PI * 5.0).unwrap();
        let m = ModulationSpec::with_beta(1.0, TWO_PI * 0.5, 0.0).unwrap();
        let s = HilbertSpace::qubits(2).unwrap();
        let k = |a, b| StateVector::basis(&s, &[a, b]).unwrap();

        let h = lab_frame_pair_hamiltonian(&q1, &q2, &CouplingSpec::real(0.0), &m, 0.7).unwrap();
        assert_eq!(h.restricted(&[0, 1, 2, 3]), CMatrix::from_diagonal(&h.matrix().diagonal()));

        let g = c(0.03, 0.01);
        let h = lab_frame_pair_hamiltonian(&q1, &q2, &CouplingSpec::new(g), &m, 0.0).unwrap();
        assert!(h.is_hermitian());
        assert_eq!(h.element(&k(1, 0), &k(0, 1)), g);
        let e10 = h.element(&k(1, 0), &k(1, 0)).re;
        assert!((e10 - 0.5 * (q1.omega - q2.omega)).abs() < 1e-12);
    }

    #[test]
    fn interaction_picture_matches_lab_frame() {
        let dev = DeviceSpec::resonant(TWO_PI * 4.5, TWO_PI * 5.0, TWO_PI * 0.005, 1.0, 0.4).unwrap();
        let t = 3.21;
        // Closed-form frequency integral against Simpson quadrature.
        let n = 20_000;
        let h = t / n as f64;
        let omega = |s: f64| {
            dev.q1.omega + dev.modulation.epsilon * (dev.modulation.nu * s + dev.modulation.phase).sin()
        };
        let mut simpson = omega(0.0) + omega(t);
        for k in 1..n {
            simpson += omega(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        simpson *= h / 3.0;
        let (th1, th2) = dev.free_phases(t);
        assert!((th1 - simpson).abs() < 1e-9);

        let u0 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::from_polar(1.0, 0.5 * (th1 + th2)),
            C64::from_polar(1.0, 0.5 * (th1 - th2)),
            C64::from_polar(1.0, -0.5 * (th1 - th2)),
            C64::from_polar(1.0, -0.5 * (th1 + th2)),
        ]));
        let lab = dev.lab_hamiltonian(t).unwrap();
        let h0 = CMatrix::from_diagonal(&lab.matrix().diagonal());
        let h12 = lab.matrix() - h0;
        let rotated = u0.adjoint() * h12 * &u0;
        assert!(max_abs(&(rotated - dev.interaction_hamiltonian(t))) < 1e-12);
    }

    #[test]
    fn rwa_zero_coupling() {
        let dev = DeviceSpec::resonant(TWO_PI * 4.5, TWO_PI * 5.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(rwa_deviation(&dev, 10.0, 11).unwrap(), 0.0);
    }

    #[test]
    fn rwa_validity_and_trend() {
        let dev = DeviceSpec::resonant(TWO_PI * 4.5, TWO_PI * 5.0, TWO_PI * 0.005, 1.0, 0.0).unwrap();
        let period = dev.exchange_period().unwrap();
        let report = rwa_comparison(&dev, period, 201).unwrap();
        assert!(report.deviation <= 0.05, "deviation {}", report.deviation);
        assert!(report.p_full[100] > 0.9);

        let weak = DeviceSpec {
            coupling: CouplingSpec::real(TWO_PI * 0.0025),
            ..dev
        };
        let weaker = rwa_deviation(&weak, weak.exchange_period().unwrap(), 201).unwrap();
        assert!(weaker < report.deviation, "{weaker} vs {}", report.deviation);
    }
}
