use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_binormal");

const SMALL_PIPELINE: &str = "[pipeline]
v_half_width = 512.0
v_points = 1024
t_min = 0.01
refine = 8
x_max = 1.0
";

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn binormal(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("BINORMAL_THREADS", "2").output().unwrap()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn straight_line_selfsimilar_run_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        "schema_version = 1\nexperiment = \"selfsimilar\"\n[selfsimilar]\namplitudes = [0.0, 0.5]\ntimes = [0.1]\n",
    );
    let out = tmp.path().join("out");
    let o = binormal(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let theta = std::fs::read_to_string(out.join("theta.csv")).unwrap();
    assert!(theta.lines().nth(1).unwrap().starts_with("0,3.14159"));
    assert_eq!(report(&out)["status"], "pass");
}

#[test]
fn zero_datum_full_pipeline_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        "schema_version = 1\nexperiment = \"full-pipeline\"\n{SMALL_PIPELINE}u_plus = {{ family = \"zero\" }}\n"
    );
    let cfg = write(tmp.path(), "c.toml", &text);
    let out = tmp.path().join("out");
    let o = binormal(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout.contains("PASS zero datum deviation"));
    let r = report(&out);
    assert!(r["summary"]["singularity"]["max_tangent_deviation"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn artifacts_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("schema_version = 1\nexperiment = \"reconstruct\"\n{SMALL_PIPELINE}");
    let cfg = write(tmp.path(), "c.toml", &text);
    let mut manifests = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("out{k}"));
        let o = binormal(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
        manifests.push(std::fs::read_to_string(out.join("manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
    assert!(manifests[0].contains("curves/slice_00.csv"));
}

#[test]
fn validate_reports_errors_and_warnings() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", "schema_version = 1\nexperiment = \"singularity\"\n[pipeline]\nt_min = 0.0\n");
    assert_eq!(binormal(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));

    let warn = write(tmp.path(), "warn.toml", "schema_version = 1\nexperiment = \"full-pipeline\"\n[pipeline]\na = 0.5\n");
    let o = binormal(&["validate", warn.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("contraction regime"));

    let mean = write(
        tmp.path(),
        "mean.toml",
        "schema_version = 1\nexperiment = \"scatter\"\n[scatter]\nu_plus = { family = \"gaussian\", amplitude = 0.01, width = 2.0 }\n",
    );
    let o = binormal(&["validate", mean.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("zero-mode"));
}

#[test]
fn unknown_keys_exit_with_config_status() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "schema_version = 1\nexperiment = \"scatter\"\n[scatter]\nhalfwidth = 3.0\n");
    let out = tmp.path().join("out");
    let o = binormal(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn runtime_errors_are_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        "schema_version = 1\nexperiment = \"reconstruct\"\n{SMALL_PIPELINE}u_plus = {{ family = \"gaussian-derivative\", amplitude = 50.0, width = 8.0, order = 2 }}\n"
    );
    let cfg = write(tmp.path(), "c.toml", &text);
    let out = tmp.path().join("out");
    let o = binormal(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "error");
    assert!(r["error"]["kind"].is_string());
}
