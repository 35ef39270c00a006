use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbitlab::{run_text, Options};
use serde_json::Value;

fn manifests() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests")
}

fn orbitlab(args: &[&str], env_precision: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orbitlab"));
    c.args(args).env_remove("ORBITLAB_PRECISION");
    if let Some(m) = env_precision {
        c.env("ORBITLAB_PRECISION", m);
    }
    c.output().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn text(t: &str) -> (i32, Value) {
    let out = run_text(t, Path::new("."), &Options::default());
    (out.code, serde_json::from_str(&out.report).unwrap())
}

#[test]
fn sample_manifests_succeed() {
    for entry in std::fs::read_dir(manifests()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        let o = orbitlab(&["--manifest", path.to_str().unwrap()], None);
        let expect = if name == "closure-insufficient" { 2 } else { 0 };
        assert_eq!(o.status.code(), Some(expect), "{name}");
        let r = report(&o);
        assert!(r["bounds"]["precision"].is_i64(), "{name}");
        assert!(r["command"].is_string(), "{name}");
    }
}

#[test]
fn spec_examples_give_the_expected_reports() {
    let run = |name: &str| report(&orbitlab(&["--manifest", manifests().join(name).to_str().unwrap()], None));
    let r = run("classify-chebyshev.toml");
    assert_eq!(r["type"], "monomial");
    assert_eq!(r["witness"]["pi"], "(x^2 + 1) / (x)");
    let r = run("dml-doubling.toml");
    assert_eq!(r["hits"], serde_json::json!([3]));
    let r = run("closure-squares.toml");
    assert_eq!(r["forms"].as_array().unwrap().len(), 1);
    let r = run("closure-insufficient.toml");
    assert_eq!(r["error"]["kind"], "insufficient_sample");
    let r = run("adelic-pell.toml");
    assert_eq!(r["member"], true);
}

#[test]
fn exit_codes() {
    let (code, r) = text("command = \"frobnicate\"\n");
    assert_eq!(code, 64);
    assert_eq!(r["error"]["kind"], "unknown_command");
    assert_eq!(r["command"], "frobnicate");

    let (code, r) = text("command = \"classify\"\n[map]\npolynomial = [\"x\"]\n");
    assert_eq!(code, 65);
    assert!(r["error"].is_object());

    let (code, _) = text("command = \"classify\"\nbogus = 1\n[map]\npolynomial = [\"0\", \"0\", \"1\"]\n");
    assert_eq!(code, 65);

    let (code, r) = text("command = \"classify\"\n[map]\npolynomial = [\"0\", \"1\"]\n");
    assert_eq!(code, 2, "{r}");

    let o = orbitlab(&["--manifest", "/nonexistent/orbitlab.toml"], None);
    assert_eq!(o.status.code(), Some(66));
    let o = orbitlab(&["--frobnicate"], None);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn precision_precedence() {
    let path = manifests().join("attractor-fixed-line.toml");
    let p = path.to_str().unwrap();
    // the manifest pins 40, which beats the environment
    let r = report(&orbitlab(&["--manifest", p], Some("12")));
    assert_eq!(r["bounds"]["precision"], 40);
    let r = report(&orbitlab(&["--manifest", p, "--precision", "16"], Some("12")));
    assert_eq!(r["bounds"]["precision"], 16);
    let dml = manifests().join("dml-doubling.toml");
    let r = report(&orbitlab(&["--manifest", dml.to_str().unwrap()], Some("12")));
    assert_eq!(r["bounds"]["precision"], 12);
    let r = report(&orbitlab(&["--manifest", dml.to_str().unwrap()], None));
    assert_eq!(r["bounds"]["precision"], orbitlab::DEFAULT_PRECISION);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("orbitlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let m = manifests().join("independence.toml");
    let o = orbitlab(&["--manifest", m.to_str().unwrap(), "--out", out.to_str().unwrap(), "--pretty"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["command"], "independence");
    std::fs::remove_dir_all(&dir).unwrap();
}
