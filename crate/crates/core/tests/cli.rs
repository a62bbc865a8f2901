use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_warp-einstein"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn catalog_list_shows_the_table() {
    let o = run(&["catalog", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["spherical-cap", "flat-ray", "hyperbolic-boundary", "exp-warped", "exp-einstein", "hyperbolic-space"] {
        assert!(text.contains(name), "{name} missing");
    }
    assert_eq!(text.matches("None").count(), 4);

    let o = run(&["catalog", "--list", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 9);
}

#[test]
fn emit_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cap.csv");
    let o = run(&["catalog", "--emit", "spherical-cap", "--n", "4", "--m", "3", "--const", "c=2,kbar=0.5,k=2", "--profile-out", p(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["verify", "--input", p(&csv), "--family", "spherical-cap", "--n", "4", "--m", "3", "--const", "c=2,kbar=0.5,k=2"]);
    assert_eq!(o.status.code(), Some(0));
    let report: toml::Table = stdout(&o).parse().unwrap();
    assert_eq!(report["residuals"]["verdict"].as_str(), Some("pass"));
    assert_eq!(report["params"]["lambda"].as_float(), Some(3.0));

    // Same file, wrong λ: failing verdict.
    let o = run(&["verify", "--input", p(&csv), "--n", "4", "--m", "3", "--lambda", "2.5", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_are_bit_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "solve".to_string(),
            "--n=3".into(),
            "--m=2".into(),
            "--lambda=-4".into(),
            "--k=-1".into(),
            "--t0=1".into(),
            format!("--u0={}", 1f64.cosh()),
            format!("--du0={}", 1f64.sinh()),
            format!("--f0={}", 1f64.sinh()),
            format!("--df0={}", 1f64.cosh()),
            "--t-span=-inf,2".into(),
            "--profile-out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let oa = bin().args(args(&a)).output().unwrap();
    let ob = bin().args(args(&b)).output().unwrap();
    assert_eq!(oa.status.code(), Some(0), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("profile =")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&oa), strip(&ob));
    let report: toml::Table = stdout(&oa).parse().unwrap();
    assert_eq!(report["endpoints"]["left"]["kind"].as_str(), Some("boundary"));
    assert_eq!(report["endpoints"]["completeness"].as_str(), Some("incomplete"));

    let o = run(&["classify", "--input", p(&a), "--n", "3", "--m", "2", "--lambda", "-4", "--k", "-1"]);
    let report: toml::Table = stdout(&o).parse().unwrap();
    assert_eq!(report["endpoints"]["left"]["kind"].as_str(), Some("boundary"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        "[params]\nn = 3\nm = 2\nlambda = 4.0\nk = 1.0\n\n[initial]\nt0 = 0.0\nu0 = 0.0\ndu0 = 1.0\nf0 = 1.0\ndf0 = 0.0\ncross_boundary = true\n\n[shoot]\ntarget = \"critical-min\"\nfree = \"ddf0\"\nbracket = [-3.0, 0.0]\n",
    )
    .unwrap();
    let o = run(&["--config", p(&cfg), "--format", "json", "--output", p(&out), "shoot", "--bracket=-1.5,-0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let value = v["shooting"]["free_value"].as_f64().unwrap();
    assert!((value + 1.0).abs() < 1e-6, "{value}");
    assert_eq!(v["endpoints"]["right"]["kind"], "critical_min");
}

#[test]
fn sweep_writes_isolated_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--families", "flat-ray,exp-einstein", "--n", "3,4", "--m", "2", "--nodes", "101", "--output-dir", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let report: toml::Table = stdout(&o).parse().unwrap();
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    assert!(runs.iter().all(|r| r["verdict"].as_str() == Some("pass")));
    assert!(dir.path().join("exp-einstein-n4-m2.csv").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["catalog", "--emit", "no-such-family", "--n", "3", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["catalog", "--emit", "flat-ray", "--n", "3", "--m", "2", "--const", "kbar=1"]).status.code(), Some(2));
    assert_eq!(run(&["catalog", "--emit", "spherical-cap", "--n", "3", "--m", "2", "--grid", "-1,1,11"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--input", "/nonexistent.csv", "--n", "3", "--m", "2", "--lambda", "0", "--k", "0"]).status.code(), Some(2));

    // A bracket that does not straddle is a numerical failure.
    let o = run(&[
        "shoot", "--n=3", "--m=2", "--lambda=-4", "--k=-1", "--t0=1", "--u0=1.5430806348152437", "--du0=1.1752011936438014",
        "--f0=1.1752011936438014", "--target=boundary", "--free=df0", "--bracket=1.6,2", "--direction=-1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
}
