//! End-to-end runs of the `cpsg` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cpsg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpsg"))
        .args(args)
        .current_dir(dir)
        .env_remove("CPSG_JOBS")
        .output()
        .expect("spawn cpsg")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const TWO: &str = r#"
seed = 5
output_dir = "out"

[[scenario]]
id = "thm34-holomorphic"
k = 2000
n_hi = 10

[[scenario]]
id = "thm41-no-log"
n_hi = 10
pz_samples = 16
"#;

#[test]
fn list_prints_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpsg(dir.path(), &["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for e in cpsg::cli::catalog() {
        assert!(text.contains(e.id), "{} missing", e.id);
    }
}

#[test]
fn holomorphic_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", "[[scenario]]\nid = \"thm34-holomorphic\"\n");
    let out = cpsg(dir.path(), &["run", "c.toml"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&dir.path().join("cpsg-out/manifest.json"));
    assert_eq!(m["header"]["schema"], "v1");
    assert_eq!(m["scenarios"][0]["verdict"], "pass");
    let r = json(&dir.path().join("cpsg-out/01-thm34-holomorphic.json"));
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["parameters"]["k"], 10_000);
}

#[test]
fn empty_config_gives_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", "seed = 1\n");
    let out = cpsg(dir.path(), &["run", "c.toml"]);
    assert_eq!(out.status.code(), Some(0));
    let m = json(&dir.path().join("cpsg-out/manifest.json"));
    assert_eq!(m["scenarios"].as_array().unwrap().len(), 0);
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", "[[scenario]]\nid = \"no-such-thing\"\n");
    let out = cpsg(dir.path(), &["run", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-thing"));
    assert!(!dir.path().join("cpsg-out").exists());

    assert_eq!(cpsg(dir.path(), &["check", "no-such-thing"]).status.code(), Some(2));
}

#[test]
fn bad_parameters_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpsg(dir.path(), &["check", "thm34-holomorphic", "--param", "kk=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kk"));
    let out = cpsg(dir.path(), &["check", "thm34-holomorphic", "--param", "k=\"big\""]);
    assert_eq!(out.status.code(), Some(2));
    write(dir.path(), "c.toml", "[[scenario]]\nid = \"thm34-holomorphic\"\nalpha = \"one\"\n");
    assert_eq!(cpsg(dir.path(), &["run", "c.toml"]).status.code(), Some(2));
    write(dir.path(), "bad.toml", "[[scenario]\n");
    assert_eq!(cpsg(dir.path(), &["run", "bad.toml"]).status.code(), Some(2));
    assert_eq!(cpsg(dir.path(), &["run", "missing.toml"]).status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpsg(dir.path(), &["check", "thm34-holomorphic", "--param", "tolerance=0.0001"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fail"));
}

#[test]
fn check_writes_outputs_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpsg(dir.path(), &["check", "thm34-holomorphic", "--param", "k=2000", "--out", "o"]);
    assert!(out.status.success() || out.status.code() == Some(0) || out.status.code() == Some(1));
    let r = json(&dir.path().join("o/01-thm34-holomorphic.json"));
    assert_eq!(r["parameters"]["k"], 2000);
    assert!(dir.path().join("o/01-thm34-holomorphic.cn_decay.csv").exists());
}

#[test]
fn runs_are_byte_identical_and_order_preserving() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write(a.path(), "c.toml", TWO);
    write(b.path(), "c.toml", TWO);
    assert!(cpsg(a.path(), &["run", "c.toml", "--jobs", "1"]).status.code().is_some());
    let out = Command::new(env!("CARGO_BIN_EXE_cpsg"))
        .args(["run", "c.toml"])
        .current_dir(b.path())
        .env("CPSG_JOBS", "2")
        .output()
        .unwrap();
    assert!(out.status.code().is_some());

    let ma = json(&a.path().join("out/manifest.json"));
    let mb = json(&b.path().join("out/manifest.json"));
    assert_eq!(ma["scenarios"], mb["scenarios"]);
    assert_eq!(ma["seed"], 5);
    let ids: Vec<&str> =
        ma["scenarios"].as_array().unwrap().iter().map(|s| s["scenario_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["thm34-holomorphic", "thm41-no-log"]);

    for entry in ma["scenarios"].as_array().unwrap() {
        let mut files = vec![entry["result_file"].as_str().unwrap().to_string()];
        files.extend(entry["curve_files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()));
        for f in files {
            let x = fs::read(a.path().join("out").join(&f)).unwrap();
            let y = fs::read(b.path().join("out").join(&f)).unwrap();
            assert_eq!(x, y, "{f} differs between runs");
            if f.ends_with(".csv") {
                let text = String::from_utf8(x).unwrap();
                assert!(text.starts_with('#'), "{f} lacks a comment header");
                let widths: Vec<usize> =
                    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').count()).collect();
                assert!(!widths.is_empty() && widths.iter().all(|w| *w == widths[0]), "{f} is ragged");
            }
        }
    }
}

#[test]
fn invalid_jobs_env_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.toml", "seed = 1\n");
    let out = Command::new(env!("CARGO_BIN_EXE_cpsg"))
        .args(["run", "c.toml"])
        .current_dir(dir.path())
        .env("CPSG_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = cpsg::cli::RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        for s in &cfg.scenarios {
            cfg.params_for(s).unwrap();
        }
    }
}
