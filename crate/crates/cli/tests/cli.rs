use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmc-lab")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&read(p)).unwrap()
}

fn every_file_has_meta(dir: &Path) {
    for e in std::fs::read_dir(dir).unwrap() {
        let name = e.unwrap().file_name().into_string().unwrap();
        if !name.ends_with(".meta.json") {
            let meta = json(&dir.join(format!("{name}.meta.json")));
            assert_eq!(meta["file"], name.as_str());
            assert_eq!(meta["tool"], "cmc-lab");
            assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
        }
    }
}

#[test]
fn solve_writes_field_and_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["solve", "--domain", "unit_disk", "--H", "0.5", "--signature", "euclid", "--h", "0.015625", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("field.csv"));
    assert!(csv.starts_with("x,y,u\n"));
    let outcome = json(&dir.path().join("outcome.json"));
    assert_eq!(outcome["status"]["kind"], "converged");
    assert_eq!(outcome["prediction"], "exists");
    assert!((outcome["sup_u"].as_f64().unwrap() - (2.0 - 3f64.sqrt())).abs() < 2e-3);
    assert!(read(&dir.path().join("diagnostics.jsonl")).lines().count() > 10);
    every_file_has_meta(dir.path());
}

#[test]
fn predicted_nonexistence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["solve", "--H", "1.2", "--h", "0.0625", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let outcome = json(&dir.path().join("outcome.json"));
    assert_ne!(outcome["status"]["kind"], "converged");
    assert_eq!(outcome["prediction"], "does_not_exist");
}

#[test]
fn predicates_on_the_star() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["predicates", "--domain", "star(1, 0.3, 5)", "--signature", "lorentz", "--H", "3", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("predicates.json"));
    assert_eq!(report["lorentz_smooth_ok"], true);
    assert_eq!(report["lorentz_convex_ok"], false);
    assert_eq!(report["prediction"], "exists");
}

#[test]
fn config_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "command = \"solve\"\n[continuation]\nnewton_tolerance = 1e-9\n").unwrap();
    let out = lab(&["--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error kind=config") && err.contains("newton_tolerance"), "{err}");

    for args in [
        &["solve", "--domain", "torus"][..],
        &["solve", "--h", "-1"],
        &["solve", "--h", "5"],
        &["solve", "--signature", "riemann"],
        &["--H", "1"],
    ] {
        let out = lab(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error kind=config"));
    }
}

#[test]
fn effective_config_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("run");
    let out = lab(&["solve", "--domain", "ellipse(1.2, 0.8)", "--H", "0.4", "--h", "0.0625", "--out", path(&d)]);
    assert_eq!(out.status.code(), Some(0));
    let names = ["field.csv", "outcome.json", "diagnostics.jsonl", "effective_config.toml", "field.csv.meta.json"];
    let before: Vec<String> = names.iter().map(|n| read(&d.join(n))).collect();
    let out = lab(&["--config", path(&d.join("effective_config.toml"))]);
    assert_eq!(out.status.code(), Some(0));
    let after: Vec<String> = names.iter().map(|n| read(&d.join(n))).collect();
    assert_eq!(before, after);
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["verify", "--domain", "star", "--signature", "lorentz", "--H", "1", "--h", "0.03125", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["all_pass"], true);
    let checks = report["checks"].as_array().unwrap();
    for key in ["name", "bound", "measured", "slack", "tol", "pass"] {
        assert!(checks.iter().all(|c| c.get(key).is_some()), "{key}");
    }
    every_file_has_meta(dir.path());
}

#[test]
fn catalog_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["catalog", "--H", "1", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let listing = json(&dir.path().join("catalog.json"));
    assert_eq!(listing["surfaces"].as_array().unwrap().len(), 5);
    assert!(read(&dir.path().join("catalog_lorentz_cap.csv")).starts_with("x,y,u\n"));
    let family = read(&dir.path().join("family.csv"));
    assert_eq!(family.lines().count(), 4);
    every_file_has_meta(dir.path());
}

#[test]
fn sweep_over_mean_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        "command = \"sweep\"\nh = 0.0625\n[sweep]\nH = [0.1, 0.3, 0.5, 0.7, 0.9]\nsignatures = [\"euclid\"]\n",
    )
    .unwrap();
    let out = lab(&["--config", path(&cfg), "--jobs", "3", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers[..7],
        ["H", "signature", "status", "sup_u", "max_du", "diam_bound_slack", "strip_bound_slack"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| &r[2] == "converged"));
    let sup: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(sup.windows(2).all(|w| w[1] > w[0]), "{sup:?}");
}

#[test]
fn sweep_flags_nonexistence_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, "command = \"sweep\"\nh = 0.125\n[sweep]\nH = [1.05, 1.5]\n").unwrap();
    let out = lab(&["--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let table = read(&dir.path().join("sweep.csv"));
    assert!(table.lines().skip(1).all(|l| !l.contains(",converged,") && l.contains("does_not_exist")));
}
