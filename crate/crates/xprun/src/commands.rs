use holodfs::device::{rwa_comparison, RwaReport};
use holodfs::holonomy::{
    cnot_params, compile_gate, gate_profile, population_trace, verify_conditions,
    verify_two_qubit_conditions, ConditionReport, GateName, GateParams, PopulationTrace,
};
use holodfs::qdyn::{HilbertSpace, StateVector};

use crate::config::Config;
use crate::error::{XpError, XpResult};
use crate::sweep::{run_sweep, SweepRow};

/// `[gate]` at `[noise].delta`.
pub fn cmd_run(cfg: &Config) -> XpResult<Vec<SweepRow>> {
    run_sweep(&cfg.point_config()?, 1)
}

pub fn cmd_sweep(cfg: &Config, threads: usize) -> XpResult<Vec<SweepRow>> {
    run_sweep(&cfg.sweep_config()?, threads)
}

/// Logical populations during `[gate]` starting from `|0⟩_L`.
pub fn cmd_trace(cfg: &Config) -> XpResult<PopulationTrace> {
    let point = cfg.point_config()?;
    if point.gate.is_two_qubit() {
        return Err(XpError::config("trace supports single-qubit gates only"));
    }
    let (theta, phi, gamma) = point.gate.angles();
    let params = GateParams::new(theta, phi, gamma, point.tau_ns)?;
    let kind = cfg.gate.protocol;
    let schedule = compile_gate(kind, &params)?;
    let zero = StateVector::basis(&HilbertSpace::qubits(1)?, &[0])?;
    let noise = point.noise(cfg.noise.delta)?;
    Ok(population_trace(&schedule, kind, &zero, point.trace_points, &noise)?)
}

/// Holonomy conditions for `[gate]` under `[gate].protocol` (DFS holonomic
/// protocols only).
pub fn cmd_verify(cfg: &Config) -> XpResult<ConditionReport> {
    let kind = cfg.gate.protocol;
    if !(kind.is_dfs() && kind.is_holonomic()) {
        return Err(XpError::config(format!(
            "verify supports SR_NHQC_DFS and NHQC_DFS, got {kind}"
        )));
    }
    let tau = cfg.gate.tau_ns;
    let report = match cfg.gate.name {
        GateName::Cnot => verify_two_qubit_conditions(&cnot_params(kind, tau)?)?,
        gate => {
            let (theta, phi, gamma) = gate.angles();
            let params = GateParams::new(theta, phi, gamma, tau)?;
            let profile = gate_profile(kind, &params)?.expect("holonomic protocol has a profile");
            verify_conditions(&params, &profile)?
        }
    };
    Ok(report)
}

pub fn report_json(report: &ConditionReport) -> serde_json::Value {
    serde_json::json!({
        "cyclicity_defect": report.cyclicity_defect,
        "parallel_transport_defect": report.parallel_transport_defect,
        "sr_defect": report.sr_defect,
        "sr_defect_refined": report.sr_defect_refined,
        "cyclic": report.cyclic(),
        "parallel_transported": report.parallel_transported(),
        "super_robust": report.super_robust(),
        "all_pass": report.all_pass(),
    })
}

/// Full-model vs effective exchange for `[device]`.
pub fn cmd_rwa_check(cfg: &Config) -> XpResult<RwaReport> {
    let dev = cfg.device.device()?;
    let duration = match cfg.device.duration_ns {
        Some(t) => t,
        None => dev.exchange_period().map_err(|e| XpError::config(format!("[device]: {e}")))?,
    };
    Ok(rwa_comparison(&dev, duration, cfg.device.samples)?)
}
