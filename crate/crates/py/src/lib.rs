//! Python bindings: gate evaluation, condition checks, population traces and
//! the device-level helpers.

use holodfs::device::{bessel_j as core_bessel_j, rwa_comparison, DeviceSpec};
use holodfs::holonomy::{
    cnot_params, compile_gate, evaluate_gate, gate_profile, population_trace as core_trace,
    target_unitary as core_target, two_qubit_target, verify_conditions,
    verify_two_qubit_conditions, ConditionReport, GateEvaluation, GateName, GateParams,
    ProtocolKind,
};
use holodfs::open_system::{NoiseSpec, RateConvention, Topology};
use holodfs::qdyn::{HilbertSpace, Operator, StateVector, C64};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::f64::consts::PI;

fn py_err(e: holodfs::Error) -> PyErr {
    if e.is_integrity_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr<Err = holodfs::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

pub fn parse_topology(s: &str) -> Result<Topology, String> {
    match s.to_ascii_lowercase().as_str() {
        "collective" => Ok(Topology::Collective),
        "independent" => Ok(Topology::Independent),
        other => Err(format!("unknown topology '{other}'")),
    }
}

pub fn parse_rate(s: &str) -> Result<RateConvention, String> {
    match s.to_ascii_lowercase().as_str() {
        "inverse_t2" => Ok(RateConvention::InverseT2),
        "inverse_two_t2" => Ok(RateConvention::InverseTwoT2),
        other => Err(format!("unknown rate convention '{other}'")),
    }
}

fn matrix_rows(op: &Operator) -> Vec<Vec<C64>> {
    let m = op.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Amplitude error and dephasing applied to a gate.
#[pyclass(name = "Noise", module = "holodfs", from_py_object)]
#[derive(Clone)]
struct PyNoise {
    inner: NoiseSpec,
}

#[pymethods]
impl PyNoise {
    #[new]
    #[pyo3(signature = (delta = 0.0, t2_us = f64::INFINITY, topology = "collective", rate_convention = "inverse_t2"))]
    fn new(delta: f64, t2_us: f64, topology: &str, rate_convention: &str) -> PyResult<Self> {
        let mut inner = NoiseSpec::new(delta, t2_us, parse_topology(topology).map_err(PyValueError::new_err)?)
            .map_err(py_err)?;
        inner.rate_convention = parse_rate(rate_convention).map_err(PyValueError::new_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn t2_us(&self) -> f64 {
        self.inner.t2_us
    }

    /// Pure-dephasing rate in 1/ns.
    #[getter]
    fn gamma_phi(&self) -> f64 {
        self.inner.gamma_phi()
    }

    fn __repr__(&self) -> String {
        format!("Noise(delta={}, t2_us={}, topology={:?})", self.inner.delta, self.inner.t2_us, self.inner.topology)
    }
}

/// Fidelity and channel diagnostics of one gate evaluation.
#[pyclass(name = "GateReport", module = "holodfs", frozen, get_all, skip_from_py_object)]
struct PyGateReport {
    avg_gate_fidelity: f64,
    process_fidelity: f64,
    leakage: f64,
    trace_defect: f64,
    min_choi_eigenvalue: f64,
}

impl From<GateEvaluation> for PyGateReport {
    fn from(e: GateEvaluation) -> Self {
        Self {
            avg_gate_fidelity: e.fidelity.avg_gate_fidelity,
            process_fidelity: e.fidelity.process_fidelity,
            leakage: e.fidelity.leakage,
            trace_defect: e.run.trace_defect,
            min_choi_eigenvalue: e.run.min_choi_eigenvalue,
        }
    }
}

#[pymethods]
impl PyGateReport {
    fn __repr__(&self) -> String {
        format!(
            "GateReport(avg_gate_fidelity={:.12}, leakage={:.3e})",
            self.avg_gate_fidelity, self.leakage
        )
    }
}

/// Defects of the cyclic, parallel-transport and super-robust conditions.
#[pyclass(name = "ConditionReport", module = "holodfs", frozen, get_all, skip_from_py_object)]
struct PyConditionReport {
    cyclicity_defect: f64,
    parallel_transport_defect: f64,
    sr_defect: f64,
    sr_defect_refined: f64,
    cyclic: bool,
    parallel_transported: bool,
    super_robust: bool,
    all_pass: bool,
}

impl From<ConditionReport> for PyConditionReport {
    fn from(r: ConditionReport) -> Self {
        Self {
            cyclicity_defect: r.cyclicity_defect,
            parallel_transport_defect: r.parallel_transport_defect,
            sr_defect: r.sr_defect,
            sr_defect_refined: r.sr_defect_refined,
            cyclic: r.cyclic(),
            parallel_transported: r.parallel_transported(),
            super_robust: r.super_robust(),
            all_pass: r.all_pass(),
        }
    }
}

#[pymethods]
impl PyConditionReport {
    fn __repr__(&self) -> String {
        format!(
            "ConditionReport(cyclicity={:.3e}, parallel_transport={:.3e}, sr={:.3e}, all_pass={})",
            self.cyclicity_defect,
            self.parallel_transport_defect,
            self.sr_defect,
            if self.all_pass { "True" } else { "False" }
        )
    }
}

fn noise_or_default(noise: Option<PyNoise>) -> NoiseSpec {
    noise.map(|n| n.inner).unwrap_or_default()
}

/// Protocol names accepted by the other functions.
#[pyfunction]
fn protocols() -> Vec<&'static str> {
    ProtocolKind::ALL.iter().map(|k| k.as_str()).collect()
}

/// Evaluates a named gate ("not", "hadamard", "cnot").
#[pyfunction]
#[pyo3(signature = (gate, protocol = "SR_NHQC_DFS", tau_ns = 100.0, noise = None))]
fn evaluate(py: Python<'_>, gate: &str, protocol: &str, tau_ns: f64, noise: Option<PyNoise>) -> PyResult<PyGateReport> {
    let gate: GateName = parse(gate)?;
    let kind: ProtocolKind = parse(protocol)?;
    let noise = noise_or_default(noise);
    py.detach(|| holodfs::holonomy::evaluate(gate, kind, tau_ns, &noise))
        .map(PyGateReport::from)
        .map_err(py_err)
}

/// Evaluates the single-qubit gate with rotation axis (theta, phi) and
/// holonomy angle gamma.
#[pyfunction]
#[pyo3(signature = (theta, phi, gamma, protocol = "SR_NHQC_DFS", tau_ns = 100.0, noise = None))]
fn evaluate_rotation(
    py: Python<'_>,
    theta: f64,
    phi: f64,
    gamma: f64,
    protocol: &str,
    tau_ns: f64,
    noise: Option<PyNoise>,
) -> PyResult<PyGateReport> {
    let kind: ProtocolKind = parse(protocol)?;
    let params = GateParams::new(theta, phi, gamma, tau_ns).map_err(py_err)?;
    let noise = noise_or_default(noise);
    py.detach(|| evaluate_gate(kind, &params, &noise))
        .map(PyGateReport::from)
        .map_err(py_err)
}

/// Holonomy conditions of a named gate under a DFS holonomic protocol.
#[pyfunction]
#[pyo3(signature = (gate, protocol = "SR_NHQC_DFS", tau_ns = 100.0))]
fn verify(gate: &str, protocol: &str, tau_ns: f64) -> PyResult<PyConditionReport> {
    let gate: GateName = parse(gate)?;
    let kind: ProtocolKind = parse(protocol)?;
    if !(kind.is_dfs() && kind.is_holonomic()) {
        return Err(PyValueError::new_err(format!("{kind} is not a DFS holonomic protocol")));
    }
    let report = match gate {
        GateName::Cnot => verify_two_qubit_conditions(&cnot_params(kind, tau_ns).map_err(py_err)?),
        gate => {
            let (theta, phi, gamma) = gate.angles();
            let params = GateParams::new(theta, phi, gamma, tau_ns).map_err(py_err)?;
            let profile = gate_profile(kind, &params).map_err(py_err)?.expect("holonomic");
            verify_conditions(&params, &profile)
        }
    };
    report.map(PyConditionReport::from).map_err(py_err)
}

/// `(times, pop_0L, pop_1L)` for a single-qubit gate started in `|0>_L`.
#[pyfunction]
#[pyo3(signature = (gate, protocol = "SR_NHQC_DFS", tau_ns = 100.0, points = 201, noise = None))]
fn population_trace(
    gate: &str,
    protocol: &str,
    tau_ns: f64,
    points: usize,
    noise: Option<PyNoise>,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let gate: GateName = parse(gate)?;
    if gate.is_two_qubit() {
        return Err(PyValueError::new_err("population traces are single-qubit only"));
    }
    let kind: ProtocolKind = parse(protocol)?;
    let (theta, phi, gamma) = gate.angles();
    let params = GateParams::new(theta, phi, gamma, tau_ns).map_err(py_err)?;
    let schedule = compile_gate(kind, &params).map_err(py_err)?;
    let zero = StateVector::basis(&HilbertSpace::qubits(1).map_err(py_err)?, &[0]).map_err(py_err)?;
    let t = core_trace(&schedule, kind, &zero, points, &noise_or_default(noise)).map_err(py_err)?;
    Ok((t.times, t.pop_0l, t.pop_1l))
}

/// Ideal logical unitary as nested lists of complex numbers.
#[pyfunction]
fn target_unitary(theta: f64, phi: f64, gamma: f64) -> Vec<Vec<C64>> {
    matrix_rows(&core_target(theta, phi, gamma))
}

/// Ideal two-qubit logical unitary.
#[pyfunction]
fn target_two_qubit(theta: f64, varphi: f64, gamma: f64) -> Vec<Vec<C64>> {
    matrix_rows(&two_qubit_target(theta, varphi, gamma))
}

/// Bessel function of the first kind, integer order.
#[pyfunction]
fn bessel_j(n: u32, x: f64) -> PyResult<f64> {
    core_bessel_j(n, x).map_err(py_err)
}

/// Largest population gap between the full modulated pair and its
/// effective exchange over one exchange period. Frequencies in GHz, g in MHz.
#[pyfunction]
#[pyo3(signature = (omega1_ghz = 4.5, omega2_ghz = 5.0, g_mhz = 5.0, beta = 1.0, samples = 201))]
fn rwa_deviation(py: Python<'_>, omega1_ghz: f64, omega2_ghz: f64, g_mhz: f64, beta: f64, samples: usize) -> PyResult<f64> {
    let two_pi = 2.0 * PI;
    let dev = DeviceSpec::resonant(two_pi * omega1_ghz, two_pi * omega2_ghz, two_pi * g_mhz * 1e-3, beta, 0.0)
        .map_err(py_err)?;
    py.detach(|| {
        let period = dev.exchange_period()?;
        rwa_comparison(&dev, period, samples).map(|r| r.deviation)
    })
    .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "holodfs")]
fn holodfs_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNoise>()?;
    m.add_class::<PyGateReport>()?;
    m.add_class::<PyConditionReport>()?;
    m.add_function(wrap_pyfunction!(protocols, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(population_trace, m)?)?;
    m.add_function(wrap_pyfunction!(target_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(target_two_qubit, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(rwa_deviation, m)?)?;
    Ok(())
}
