use std::process::{Command, Output};

fn sthdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sthdg")).args(args).output().expect("spawn sthdg")
}

#[test]
fn mesh_writes_legacy_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.vtk");
    let out = sthdg(&["mesh", "--grid", "4", "4", "--deform", "0.1", "--slabs", "2", "--vtk", path.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("elements: 32"), "{stdout}");
    let vtk = std::fs::read_to_string(&path).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version"));
}

#[test]
fn run_reports_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let csv = dir.path().join("slabs.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"problem": "free-stream", "grid": [3, 3], "slabs": 2, "degrees": {{"p_t": 1, "p_s": 1}}, "nu": 0.01,
               "output": {{"csv": {:?}}}}}"#,
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = sthdg(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["slabs"], 2);
    assert!(summary["max_pointwise_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"problem": "free-stream", "grid": [2, 2], "slabs": 1, "degrees": {"p_t": 1, "p_s": 1}, "colour": 3}"#,
    )
    .unwrap();
    let out = sthdg(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn unknown_suite_is_an_error() {
    let out = sthdg(&["verify", "--suite", "nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convergence_writes_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = sthdg(&["convergence", "--degrees", "1", "--levels", "4/2,16/4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("convergence_p1_nu1e-2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("cells,slabs,error,rate"));
    assert_eq!(lines.count(), 2);
}
