use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dsic-audit"));
    cmd.env_remove("DSIC_AUDIT_SEED");
    cmd
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn report(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn verdicts(v: &Value) -> Vec<(String, String)> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().into(), c["verdict"].as_str().unwrap().into()))
        .collect()
}

#[test]
fn example1_audit_meets_its_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(bin().arg("audit").arg(fixture("example1_audit.json")).arg("--out").arg(&out));
    assert_eq!(o.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(
        verdicts(&v),
        [
            ("ic-verify", "pass"),
            ("pad", "pass"),
            ("non-imposition", "pass"),
            ("neutrality", "fail"),
            ("affine-fit", "fail"),
        ]
        .map(|(a, b)| (a.to_string(), b.to_string()))
    );
    assert_eq!(v["expectations_met"], true);
    assert_eq!(v["prng"], "ChaCha8Rng");
    assert_eq!(v["checks"][4]["fit"]["status"], "infeasible");
}

#[test]
fn text_and_json_verdicts_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(bin().arg("audit").arg(fixture("calibrate_example1.json")).arg("--out").arg(&out));
    let text = String::from_utf8(o.stdout).unwrap();
    for (name, verdict) in verdicts(&report(&out)) {
        let row = text.lines().find(|l| l.starts_with(&name)).unwrap();
        assert_eq!(row.split_whitespace().nth(1), Some(verdict.as_str()), "{row}");
    }
}

#[test]
fn calibration_error_does_not_stop_other_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(bin().arg("audit").arg(fixture("calibrate_example1.json")).arg("--out").arg(&out));
    assert_eq!(o.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(v["checks"][0]["verdict"], "error");
    assert!(v["checks"][0]["error"].as_str().unwrap().contains("cannot calibrate"));
    assert_eq!(v["checks"][1]["verdict"], "pass");
    assert_eq!(v["expectations_met"], true);
}

#[test]
fn all_pass_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"agents": 2, "alternatives": 3, "box": [0, 1], "resolution": 3,
            "mechanism": {"kind": "efficient"}, "checks": ["cycle-monotonicity", "ic-verify", "pad"]}"#,
    )
    .unwrap();
    let o = run(bin().arg("audit").arg(&cfg));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"agents": 3, "alternatives": 3, "box": [0, 1], "mechanism": {"kind": "example1"}, "checks": ["pad"]}"#,
    )
    .unwrap();
    let o = run(bin().arg("audit").arg(&cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema error"));

    let o = run(bin().arg("audit").arg(dir.path().join("missing.json")));
    assert_eq!(o.status.code(), Some(2));

    let o = run(bin().arg("audit").arg(fixture("efficient_audit.json")).args(["--tolerance", "bogus=1"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let cfg = fixture("efficient_audit.json");
    run(bin().arg("audit").arg(&cfg).arg("--no-timing").arg("--out").arg(&a));
    run(bin().arg("audit").arg(&cfg).args(["--no-timing", "--jobs", "4", "--out"]).arg(&b));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(report(&a).get("timing").is_none());
}

#[test]
fn seed_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = fixture("calibrate_example1.json");
    run(bin().arg("audit").arg(&cfg).args(["--seed", "11", "--out"]).arg(&out));
    assert_eq!(report(&out)["seed"], 11);
    run(bin().arg("audit").arg(&cfg).env("DSIC_AUDIT_SEED", "12").arg("--out").arg(&out));
    assert_eq!(report(&out)["seed"], 12);
    run(bin().arg("audit").arg(&cfg).arg("--out").arg(&out));
    assert_eq!(report(&out)["seed"], 0);
}

#[test]
fn overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(bin()
        .arg("fit")
        .arg(fixture("efficient_audit.json"))
        .args(["--resolution", "4", "--tolerance", "fit=1e-7", "--out"])
        .arg(&out));
    assert_eq!(o.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["grid"]["resolution"], serde_json::json!([4, 4]));
    assert_eq!(v["tolerances"]["fit"], 1e-7);
    assert_eq!(verdicts(&v), [("affine-fit".to_string(), "pass".to_string())]);
}

#[test]
fn subcommands_pick_their_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = fixture("efficient_audit.json");

    run(bin().arg("calibrate").arg(&cfg).arg("--out").arg(&out));
    let v = report(&out);
    assert_eq!(v["checks"][0]["calibration"]["kappa"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(verdicts(&v).len(), 2);

    let o = run(bin().arg("order").arg(&cfg).arg("--out").arg(&out));
    assert_eq!(o.status.code(), Some(0));
    let lambda = &report(&out)["checks"][1]["fit"]["lambda"];
    assert!((lambda[0].as_f64().unwrap() - 0.5).abs() < 1e-6);

    run(bin().arg("payments").arg(&cfg).arg("--out").arg(&out));
    let v = report(&out);
    assert_eq!(v["synthesized_payments"].as_array().unwrap().len(), 2);
    assert_eq!(v["checks"][1]["verdict"], "pass");
}

#[test]
fn demo_runs_the_bundled_audit() {
    let o = run(bin().args(["demo-example1", "--json", "--no-timing"]));
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mechanism"], "example1");
    assert_eq!(v["expectations_met"], true);
}
