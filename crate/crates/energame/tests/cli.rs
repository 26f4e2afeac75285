//! End-to-end runs of the binary.

use std::process::{Command, Output};

use serde_json::Value;

fn energame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_energame")).args(args).env_remove("ENERGAME_TOL").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn values(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn envelope_on_every_command() {
    for args in [
        &["report", "path:3"][..],
        &["audit", "path:3"],
        &["shapley", "path:3"],
        &["sweep", "--max-n", "3"],
    ] {
        let out = energame(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v = json(&out);
        assert_eq!(v["command"], args[0]);
        assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
        assert_eq!(v["tolerances"]["core"], 1e-8);
    }
}

#[test]
fn report_numbers() {
    let v = json(&energame(&["report", "star:6"]));
    let e = values(&v["vertex_energy"]);
    assert!((e[0] - 5f64.sqrt()).abs() < 1e-12 && (e[5] - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    let v = json(&energame(&["report", "complete:4", "--p", "3"]));
    assert!((v["p_energies"][0]["total"].as_f64().unwrap() - 30.0).abs() < 1e-9);
    let v = json(&energame(&["report", "path:3"]));
    let ineqs = v["games"][0]["core_inequalities"].as_array().unwrap();
    assert_eq!(ineqs.len(), 7);
    assert_eq!(v["games"][0]["shapley_core"]["is_member"], true);
}

#[test]
fn shapley_modes() {
    let v = json(&energame(&["shapley", "path:3", "--p", "2"]));
    assert_eq!(values(&v["values"]).iter().map(|x| x.round()).collect::<Vec<_>>(), [1.0, 2.0, 1.0]);
    let v = json(&energame(&["shapley", "path:3", "--mode", "mc", "--samples", "1000", "--seed", "9"]));
    assert_eq!(v["seed"], 9);
    assert_eq!(v["samples"], 1000);
    assert_eq!(values(&v["std_err"]).len(), 3);
    let v = json(&energame(&["shapley", "path:5", "--mode", "mc", "--samples", "0"]));
    assert_eq!(v["exhaustive"], true);
    assert_eq!(v["samples"], 120);
    assert_eq!(energame(&["shapley", "path:9", "--mode", "mc", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn audit_exit_codes() {
    let out = energame(&["audit", "cycle:4", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let out = energame(&["audit", "path:3"]);
    let v = json(&out);
    let conv = v["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["check"] == "convexity" && o["p"] == 1.0)
        .unwrap()
        .clone();
    assert_eq!(conv["verdict"], "fails");
    assert_eq!(conv["class"], "informational");
    assert_eq!(conv["witness"], "S={0,1} T={1,2}");
    assert_eq!(energame(&["audit", "path:17"]).status.code(), Some(2));
}

#[test]
fn isolated_vertex_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.g6");
    // P3 plus an isolated vertex
    std::fs::write(&path, "Cg\n").unwrap();
    let v = json(&energame(&["audit", path.to_str().unwrap()]));
    assert_eq!(v["null_players"], serde_json::json!([3]));
    assert_eq!(v["vertex_energy"][3], 0.0);

    let path = dir.path().join("g.txt");
    std::fs::write(&path, "3\n0 1\n1 1\n").unwrap();
    let out = energame(&["report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3: self-loop at vertex 1"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(energame(&["report", "path:"]).status.code(), Some(2));
    assert_eq!(energame(&["report", "path:3", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(energame(&["sweep", "--max-n", "7", "--checks", "shapley-core"]).status.code(), Some(2));
    assert_eq!(energame(&["sweep", "--max-n", "3", "--checks", "bogus"]).status.code(), Some(2));
    assert_eq!(energame(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn tolerance_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_energame"))
        .args(["shapley", "path:3"])
        .env("ENERGAME_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(json(&out)["tolerances"]["core"], 1e-6);
    let out = Command::new(env!("CARGO_BIN_EXE_energame"))
        .args(["shapley", "path:3"])
        .env("ENERGAME_TOL", "loose")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = energame(&[
        "sweep",
        "--max-n",
        "4",
        "--checks",
        "superadditivity,vertex-core,adjacent-pair",
        "--p-grid",
        "1,2",
        "--jobs",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(v["partial"], false);
    assert_eq!(v["counts"]["graphs_scanned"], 75);
    assert_eq!(v["counts"]["violations_surviving"], 0);
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("graph6,n,m,check_id,worst_slack,witness"));
    assert!(lines.any(|l| l.starts_with("A_,2,1,adjacent-pair,")));

    let stdout = energame(&["sweep", "--max-n", "3", "--format", "csv"]).stdout;
    assert!(String::from_utf8(stdout).unwrap().starts_with("graph6,n,m,check_id,worst_slack,witness\n"));
}
