use std::time::Instant;

use holodfs::holonomy::{evaluate, GateName, ProtocolKind};
use rayon::prelude::*;

use crate::config::SweepConfig;
use crate::error::{XpError, XpResult};

/// One `(protocol, δ)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub protocol: ProtocolKind,
    pub gate: GateName,
    pub delta: f64,
    pub t2_us: f64,
    pub avg_gate_fidelity: f64,
    pub leakage: f64,
    pub wall_time_ms: f64,
}

pub fn evaluate_point(cfg: &SweepConfig, protocol: ProtocolKind, delta: f64) -> holodfs::Result<SweepRow> {
    let start = Instant::now();
    let e = evaluate(cfg.gate, protocol, cfg.tau_ns, &cfg.noise(delta)?)?;
    let wall_time_ms = if cfg.record_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(SweepRow {
        protocol,
        gate: cfg.gate,
        delta,
        t2_us: cfg.t2_us,
        avg_gate_fidelity: e.fidelity.avg_gate_fidelity,
        leakage: e.fidelity.leakage,
        wall_time_ms,
    })
}

/// Evaluates every `(protocol, δ)` pair on `threads` workers. Rows come back
/// sorted by protocol name, then δ, whatever the thread count.
pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> XpResult<Vec<SweepRow>> {
    cfg.validate()?;
    let mut protocols = cfg.protocols.clone();
    protocols.sort_by_key(|k| k.as_str());
    protocols.dedup();
    let points: Vec<(ProtocolKind, f64)> = protocols
        .iter()
        .flat_map(|&k| cfg.delta_grid.iter().map(move |&d| (k, d)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| XpError::config(format!("thread pool: {e}")))?;
    let results: Vec<holodfs::Result<SweepRow>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(k, d)| evaluate_point(cfg, k, d))
            .collect()
    });
    results.into_iter().map(|r| r.map_err(XpError::from)).collect()
}
