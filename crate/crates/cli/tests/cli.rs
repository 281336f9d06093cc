use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-coreset"))
        .current_dir(dir)
        .env_remove("ROBUST_CORESET_OUT")
        .args(args)
        .output()
        .unwrap()
}

fn write_planted_csv(path: &Path) {
    let mut text = String::from("a,b,label\n");
    for i in 0..3000 {
        let c = (i % 3) as f64 * 40.0;
        let jitter = ((i * 7919) % 100) as f64 / 50.0 - 1.0;
        text.push_str(&format!("{},{},x\n", c + jitter, jitter * 0.5));
    }
    // Spread around a circle so that no center is drawn to them.
    for i in 0..12 {
        let a = i as f64 * std::f64::consts::TAU / 12.0;
        text.push_str(&format!("{},{},x\n", 1e5 * a.cos(), 1e5 * a.sin()));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn coreset_example_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(dir.path(), &["--out-dir", ".", "gen-synth", "--synth", "clusters=5,per-cluster=800,dim=3,outliers=200"]);
    assert!(gen.status.success());
    fs::rename(dir.path().join("synth.csv"), dir.path().join("data.csv")).unwrap();

    let out = run(dir.path(), &["coreset", "--n", "1000", "--k", "5", "--m", "200", "--z", "1", "--seed", "7", "data.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/coreset.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# robust-coreset v"));
    assert_eq!(lines.next().unwrap(), "id,weight,provenance,x0,x1,x2");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1000);
    let total: f64 = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 4200.0).abs() < 1e-6);
    assert_eq!(rows.iter().filter(|r| r.contains(",OUTLIER,")).count(), 200);

    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/coreset_report.json")).unwrap()).unwrap();
    assert_eq!(report["tool"], "robust-coreset");
    assert_eq!(report["config"]["k"], 5);
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["result"]["size"], 1000);
    assert!(report["timings"]["build_seconds"].is_number());
    assert!(report["result"].get("build_seconds").is_none());
}

#[test]
fn suggest_m_finds_planted_outliers() {
    let dir = tempfile::tempdir().unwrap();
    write_planted_csv(&dir.path().join("planted.csv"));
    let out = run(dir.path(), &["suggest-m", "--k", "3", "--columns", "a,b", "planted.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("suggested m = 12"));
    let curve = fs::read_to_string(dir.path().join("out/suggest_m_curve.csv")).unwrap();
    assert_eq!(curve.lines().nth(1).unwrap(), "rank,distance");
}

#[test]
fn auto_m_resolves_in_config() {
    let dir = tempfile::tempdir().unwrap();
    write_planted_csv(&dir.path().join("planted.csv"));
    let out = run(dir.path(), &["coreset", "--n", "300", "--k", "3", "--m", "auto", "--columns", "0,1", "planted.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/coreset_report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["m"]["requested"], "auto");
    assert_eq!(report["config"]["m"]["resolved"], 12);
}

#[test]
fn single_size_sweep_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "--out-dir", "sweep", "sweep-size", "--synth", "clusters=3,per-cluster=300,dim=2,outliers=10",
            "--k", "3", "--m", "10", "--sizes", "200", "--reps", "1", "--center-sets", "20", "--methods", "ours",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep/sweep_size.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("method,target_size,m,mean_error"));
    assert!(lines[1].starts_with("OURS,200,10,"));
}

#[test]
fn bad_cell_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "x,y\n1,2\n3,4\n5,oops\n").unwrap();
    let out = run(dir.path(), &["coreset", "--n", "2", "--k", "1", "bad.csv"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3"), "{err}");
    assert!(err.contains("oops"), "{err}");
}

#[test]
fn missing_file_and_bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!run(dir.path(), &["coreset", "--n", "10", "--k", "1", "nope.csv"]).status.success());
    assert!(!run(dir.path(), &["coreset", "--n", "10", "--k", "1", "--z", "0.5", "--synth", "clusters=1,per-cluster=50,dim=1"])
        .status
        .success());
    assert!(!run(dir.path(), &["solve", "--k", "1", "--solver", "ls", "--coreset", "nope.csv", "--synth", "clusters=1,per-cluster=50,dim=1"])
        .status
        .success());
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_robust-coreset"))
        .current_dir(dir.path())
        .env("ROBUST_CORESET_OUT", "from_env")
        .args(["gen-synth", "--synth", "clusters=2,per-cluster=10,dim=2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from_env/synth.csv").exists());
    assert!(dir.path().join("from_env/synth_truth.json").exists());
}
