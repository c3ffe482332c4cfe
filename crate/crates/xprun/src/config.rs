//! TOML experiment configuration.
//!
//! ```toml
//! [gate]
//! name = "not"
//! protocol = "SR_NHQC_DFS"
//! tau_ns = 100.0
//!
//! [noise]
//! delta = 0.0
//! t2_us = 40.0
//! topology = "collective"
//!
//! [sweep]
//! protocols = ["SR_NHQC_DFS", "NHQC_DFS"]
//! delta_grid = [0.0, 0.05, 0.1]
//!
//! [device]
//! omega1_ghz = 4.5
//! omega2_ghz = 5.0
//! g_mhz = 5.0
//! ```

use std::f64::consts::PI;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use holodfs::device::DeviceSpec;
use holodfs::holonomy::{GateName, ProtocolKind, DEFAULT_TAU_NS};
use holodfs::open_system::{NoiseSpec, RateConvention, Topology};
use serde::{Deserialize, Deserializer};

use crate::error::{XpError, XpResult};

fn from_name<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

fn from_names<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    let names = Option::<Vec<String>>::deserialize(d)?;
    names
        .map(|v| v.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect())
        .transpose()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub gate: GateSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub device: DeviceSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSection {
    #[serde(deserialize_with = "from_name")]
    pub name: GateName,
    /// Protocol used by `run`, `trace` and `verify`.
    #[serde(deserialize_with = "from_name")]
    pub protocol: ProtocolKind,
    pub tau_ns: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self {
            name: GateName::Not,
            protocol: ProtocolKind::SrNhqcDfs,
            tau_ns: DEFAULT_TAU_NS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyName {
    #[default]
    Collective,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateName {
    /// γ_φ = 1/T2.
    #[default]
    InverseT2,
    /// γ_φ = 1/(2 T2).
    InverseTwoT2,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Amplitude error used by `run` and `trace`.
    pub delta: f64,
    /// `inf` (or omitted) disables dephasing.
    pub t2_us: f64,
    pub topology: TopologyName,
    pub rate_convention: RateName,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            delta: 0.0,
            t2_us: f64::INFINITY,
            topology: TopologyName::Collective,
            rate_convention: RateName::InverseT2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Defaults to `[gate].protocol`.
    #[serde(deserialize_with = "from_names")]
    pub protocols: Option<Vec<ProtocolKind>>,
    /// Defaults to `[noise].delta`.
    pub delta_grid: Option<Vec<f64>>,
    pub trace_points: usize,
    /// Fill `wall_time_ms`; off by default so reruns are byte-identical.
    pub record_timing: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            protocols: None,
            delta_grid: None,
            trace_points: 201,
            record_timing: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    pub omega1_ghz: f64,
    pub omega2_ghz: f64,
    pub g_mhz: f64,
    /// Modulation index ε/ν.
    pub beta: f64,
    pub phase: f64,
    /// Defaults to one exchange period of the effective coupling.
    pub duration_ns: Option<f64>,
    pub samples: usize,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self {
            omega1_ghz: 4.5,
            omega2_ghz: 5.0,
            g_mhz: 5.0,
            beta: 1.0,
            phase: 0.0,
            duration_ns: None,
            samples: 201,
        }
    }
}

impl DeviceSection {
    pub fn device(&self) -> XpResult<DeviceSpec> {
        let two_pi = 2.0 * PI;
        DeviceSpec::resonant(
            two_pi * self.omega1_ghz,
            two_pi * self.omega2_ghz,
            two_pi * self.g_mhz * 1e-3,
            self.beta,
            self.phase,
        )
        .map_err(|e| XpError::config(format!("[device]: {e}")))
    }
}

/// Validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub gate: GateName,
    pub protocols: Vec<ProtocolKind>,
    pub delta_grid: Vec<f64>,
    pub t2_us: f64,
    pub topology: Topology,
    pub rate_convention: RateConvention,
    pub tau_ns: f64,
    pub trace_points: usize,
    pub record_timing: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> XpResult<()> {
        if self.protocols.is_empty() {
            return Err(XpError::config("[sweep] protocols is empty"));
        }
        if self.delta_grid.is_empty() {
            return Err(XpError::config("[sweep] delta_grid is empty"));
        }
        if let Some(d) = self.delta_grid.iter().find(|d| !d.is_finite()) {
            return Err(XpError::config(format!("[sweep] delta_grid contains {d}")));
        }
        if self.delta_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(XpError::config("[sweep] delta_grid must be strictly increasing"));
        }
        if !(self.tau_ns > 0.0 && self.tau_ns.is_finite()) {
            return Err(XpError::config(format!("[gate] tau_ns = {}", self.tau_ns)));
        }
        if self.trace_points < 2 {
            return Err(XpError::config("[sweep] trace_points must be at least 2"));
        }
        if self.gate.is_two_qubit() {
            if let Some(k) = self.protocols.iter().find(|k| !(k.is_dfs() && k.is_holonomic())) {
                return Err(XpError::config(format!(
                    "gate cnot supports only SR_NHQC_DFS and NHQC_DFS, got {k}"
                )));
            }
        }
        self.noise(0.0)
            .map(|_| ())
            .map_err(|e| XpError::config(format!("[noise]: {e}")))
    }

    pub fn noise(&self, delta: f64) -> holodfs::Result<NoiseSpec> {
        let mut n = NoiseSpec::new(delta, self.t2_us, self.topology)?;
        n.rate_convention = self.rate_convention;
        Ok(n)
    }
}

impl Config {
    pub fn parse(text: &str) -> XpResult<Self> {
        toml::from_str(text).map_err(|e| XpError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> XpResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| XpError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            XpError::Config(msg) => XpError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn sweep_config(&self) -> XpResult<SweepConfig> {
        let cfg = SweepConfig {
            gate: self.gate.name,
            protocols: self
                .sweep
                .protocols
                .clone()
                .unwrap_or_else(|| vec![self.gate.protocol]),
            delta_grid: self
                .sweep
                .delta_grid
                .clone()
                .unwrap_or_else(|| vec![self.noise.delta]),
            t2_us: self.noise.t2_us,
            topology: match self.noise.topology {
                TopologyName::Collective => Topology::Collective,
                TopologyName::Independent => Topology::Independent,
            },
            rate_convention: match self.noise.rate_convention {
                RateName::InverseT2 => RateConvention::InverseT2,
                RateName::InverseTwoT2 => RateConvention::InverseTwoT2,
            },
            tau_ns: self.gate.tau_ns,
            trace_points: self.sweep.trace_points,
            record_timing: self.sweep.record_timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The single point used by `run` and `trace`.
    pub fn point_config(&self) -> XpResult<SweepConfig> {
        let mut cfg = self.sweep_config()?;
        cfg.protocols = vec![self.gate.protocol];
        cfg.delta_grid = vec![self.noise.delta];
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = Config::parse("").unwrap().sweep_config().unwrap();
        assert_eq!(cfg.gate, GateName::Not);
        assert_eq!(cfg.protocols, vec![ProtocolKind::SrNhqcDfs]);
        assert_eq!(cfg.delta_grid, vec![0.0]);
        assert!(cfg.t2_us.is_infinite());
    }

    #[test]
    fn parses_all_sections() {
        let text = r#"
[gate]
name = "hadamard"
tau_ns = 80

[noise]
t2_us = 40.0
topology = "independent"
rate_convention = "inverse_two_t2"

[sweep]
protocols = ["sr-nhqc-dfs", "DG_BARE"]
delta_grid = [0.0, 0.1]

[device]
g_mhz = 2.5
"#;
        let c = Config::parse(text).unwrap();
        let s = c.sweep_config().unwrap();
        assert_eq!(s.gate, GateName::Hadamard);
        assert_eq!(s.protocols, vec![ProtocolKind::SrNhqcDfs, ProtocolKind::DgBare]);
        assert_eq!(s.topology, Topology::Independent);
        assert_eq!(s.rate_convention, RateConvention::InverseTwoT2);
        assert_eq!(s.tau_ns, 80.0);
        assert_eq!(c.device.g_mhz, 2.5);
    }

    #[test]
    fn infinite_t2_literal() {
        let c = Config::parse("[noise]\nt2_us = inf\n").unwrap();
        assert!(c.sweep_config().unwrap().t2_us.is_infinite());
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let msg = Config::parse("[gate]\nname = \"not\"\ntau = 3\n").unwrap_err().to_string();
        assert!(msg.contains("line 3") && msg.contains("tau"), "{msg}");
        let msg = Config::parse("[sweep]\nprotocols = [\"warp\"]\n").unwrap_err().to_string();
        assert!(msg.contains("warp") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn invariants_are_enforced() {
        let bad = [
            "[sweep]\ndelta_grid = []\n",
            "[sweep]\ndelta_grid = [0.1, 0.0]\n",
            "[sweep]\nprotocols = []\n",
            "[gate]\nname = \"cnot\"\n[sweep]\nprotocols = [\"DG_BARE\"]\n",
            "[gate]\nname = \"cnot\"\n[sweep]\nprotocols = [\"SR_NHQC_BARE\"]\n",
            "[noise]\nt2_us = -1.0\n",
            "[gate]\ntau_ns = 0\n",
        ];
        for text in bad {
            let err = Config::parse(text).unwrap().sweep_config().unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}");
        }
        let ok = "[gate]\nname = \"cnot\"\n[sweep]\nprotocols = [\"SR_NHQC_DFS\", \"NHQC_DFS\"]\n";
        assert!(Config::parse(ok).unwrap().sweep_config().is_ok());
    }
}
