use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qubitbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubitbath")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.json",
        r#"{
            "initial": "two_qubit_superposition",
            "quantities": ["kl", "kj", "jm", "survival"],
            "tau_max": 20.0,
            "samples": 201,
            "sweep_grid": {"n": [2, 3, 4, 8], "ratio": [0.1, 10.0], "s": [-1.0, 0.0, 0.5], "phi": [0.0, 1.0]}
        }"#,
    );
    let outs: Vec<Vec<u8>> = ["1", "4", "4"]
        .iter()
        .enumerate()
        .map(|(i, threads)| {
            let out = dir.path().join(format!("out{i}.csv"));
            let o = qubitbath(&["--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap(), "sweep"]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert!(text.starts_with("n,R,s,phi,tau,kl,kj,jm,survival\n"));
    assert_eq!(text.lines().count(), 1 + 4 * 2 * 3 * 2 * 201);
    assert!(text.lines().nth(1).unwrap().ends_with(",na,na,1.0"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"n": 8, "quantities": ["pair_w"], "samples": 3, "tau_max": 1.0}"#);
    let o = qubitbath(&["--config", &cfg, "simulate", "-n", "4"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("tau,pair_w"));
    assert_eq!(text.lines().nth(1), Some("0.0,0.5"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn json_output_carries_esd_events() {
    let o = qubitbath(&[
        "simulate", "--initial", "pair", "-n", "2", "-R", "10", "-q", "kl", "--tau-max", "30", "--samples", "30001",
        "--format", "json",
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let events = doc["esd"]["kl"].as_array().unwrap();
    assert!(!events.is_empty());
    assert!(events.last().unwrap()["revival"].is_null());
    assert_eq!(doc["columns"], serde_json::json!(["tau", "kl"]));
}

#[test]
fn exit_codes() {
    let o = qubitbath(&["simulate"]);
    assert_eq!(o.status.code(), Some(1), "empty quantity list");
    let o = qubitbath(&["simulate", "-q", "kl"]);
    assert_eq!(o.status.code(), Some(1), "kl on the W state");
    let o = qubitbath(&["sweep", "-n", "1", "-q", "survival"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qubitbath(&["simulate", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qubitbath(&["simulate", "-q", "pair_w", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qubitbath(&["--config", "/nonexistent-dir/c.json", "simulate"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qubitbath(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_passes_and_fails_on_demand() {
    let o = qubitbath(&["verify", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], serde_json::json!(true));
    let order = doc["checks"].as_array().unwrap().iter().find(|c| c["name"] == "rk4_order").unwrap();
    assert!(order["detail"].as_str().unwrap().starts_with("error ratio 1"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.json", r#"{"verify": {"tolerances": {"ode_vs_closed_form": 1e-30}}}"#);
    let o = qubitbath(&["--config", &cfg, "verify"]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ode_vs_closed_form,0,"));
}

#[test]
fn zeno_and_stationary_subcommands() {
    let o = qubitbath(&["zeno", "--intervals", "5,1,0.1", "--tau-max", "25"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("interval,count,t,gamma_z,zeno_survival,zeno_concurrence,free_survival,free_concurrence\n"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", r#"{"sweep_grid": {"n": [3, 4, 5, 6, 7, 8, 9, 10, 11, 12], "s": [0.0, -1.0]}}"#);
    let o = qubitbath(&["--config", &cfg, "stationary", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 20);
    assert_eq!(doc["graphs"].as_array().unwrap().len(), 20);
}
