use std::path::Path;
use std::process::{Command, Output};

use holodfs::holonomy::{evaluate, GateName, ProtocolKind};
use holodfs::open_system::{NoiseSpec, Topology};
use xprun::commands::{cmd_rwa_check, cmd_verify};
use xprun::output::read_sweep_csv;
use xprun::Config;

fn xprun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xprun"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SWEEP: &str = r#"
[gate]
name = "not"
tau_ns = 100.0

[noise]
t2_us = 40.0

[sweep]
protocols = ["SR_NHQC_DFS", "SR_NHQC_BARE", "NHQC_DFS"]
delta_grid = [0.0, 0.025, 0.05, 0.075, 0.1]
"#;

#[test]
fn run_with_defaults_is_an_ideal_gate() {
    let out = xprun(&["run"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("protocol,gate,delta,t2_us,fidelity,leakage,wall_time_ms"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], &["SR_NHQC_DFS", "not", "0", "inf"]);
    assert!(row[4].parse::<f64>().unwrap() >= 1.0 - 1e-6);
}

#[test]
fn sweep_output_is_deterministic_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.cfg", SWEEP);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (out, threads) in [(&a, "1"), (&b, "1"), (&c, "4")] {
        let o = xprun(&["sweep", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
    assert_eq!(bytes.last(), Some(&b'\n'));

    let rows = read_sweep_csv(&a).unwrap();
    assert_eq!(rows.len(), 15);
    let spot = rows
        .iter()
        .find(|r| r.protocol == ProtocolKind::SrNhqcDfs && r.delta == 0.05)
        .unwrap();
    let noise = NoiseSpec::new(0.05, 40.0, Topology::Collective).unwrap();
    let direct = evaluate(GateName::Not, ProtocolKind::SrNhqcDfs, 100.0, &noise).unwrap();
    assert!((spot.avg_gate_fidelity - direct.fidelity.avg_gate_fidelity).abs() < 1e-12);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.avg_gate_fidelity) && r.wall_time_ms == 0.0));
}

#[test]
fn emitted_rows_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.cfg", SWEEP);
    let first = dir.path().join("first.csv");
    assert!(xprun(&["sweep", "--config", &cfg, "--out", first.to_str().unwrap()]).status.success());
    let rows = read_sweep_csv(&first).unwrap();
    let second = dir.path().join("second.csv");
    xprun::output::emit_csv(&rows, &second).unwrap();
    assert_eq!(read_sweep_csv(&second).unwrap(), rows);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn trace_starts_in_zero_l() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.cfg", "[sweep]\ntrace_points = 11\n");
    let out = xprun(&["trace", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[0], "t_ns,pop_0L,pop_1L");
    assert_eq!(lines[1], "0,1,0");
    let last: Vec<f64> = lines[11].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 100.0);
    assert!(last[2] >= 1.0 - 1e-6);
}

#[test]
fn verify_reports_expected_conditions() {
    let report = |text: &str| cmd_verify(&Config::parse(text).unwrap()).unwrap();
    assert!(report("").all_pass());
    let nhqc = report("[gate]\nprotocol = \"NHQC_DFS\"\n");
    assert!(nhqc.cyclic() && nhqc.parallel_transported() && !nhqc.super_robust());
    assert!(report("[gate]\nname = \"cnot\"\n").all_pass());
    assert!(cmd_verify(&Config::parse("[gate]\nprotocol = \"DG_BARE\"\n").unwrap()).is_err());

    let out = xprun(&["verify", "--json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["all_pass"], true);
}

#[test]
fn rwa_check_trends() {
    let deviation = |text: &str| cmd_rwa_check(&Config::parse(text).unwrap()).unwrap().deviation;
    assert_eq!(deviation("[device]\ng_mhz = 0.0\nduration_ns = 50.0\nsamples = 11\n"), 0.0);
    let near = deviation("[device]\nduration_ns = 60.0\nsamples = 31\n");
    let far = deviation("[device]\nomega2_ghz = 5.5\nduration_ns = 60.0\nsamples = 31\n");
    assert!(far < near, "{far} vs {near}");
}

#[test]
fn rwa_check_default_device() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rwa.csv");
    let out = xprun(&["rwa-check", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let summary = String::from_utf8(out.stdout).unwrap();
    let dev: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("rwa_deviation "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(dev <= 0.05, "{dev}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t_ns,p_full,p_eff\n"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "[gate]\nname = \"cnot\"\nprotocol = \"DG_BARE\"\n",
        "[sweep]\ndelta_grid = [0.1, 0.0]\n",
        "[noise]\ntopology = \"global\"\n",
        "[gate\n",
    ];
    for (k, text) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{k}.cfg"), text);
        let out = xprun(&["sweep", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(xprun(&["run", "--config", "/nonexistent/x.cfg"]).status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = Config::load(&path).unwrap();
        cfg.sweep_config().unwrap();
        cfg.point_config().unwrap();
        count += 1;
    }
    assert!(count >= 6);
}
