//! End-to-end checks of the `jostlt` binary: exit codes, output files,
//! manifests and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jostlt-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn jostlt(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jostlt"))
        .args(args)
        .current_dir(cwd)
        .env_remove("JOSTLT_OUT")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let dir = scratch("usage");
    assert_eq!(code(&jostlt(&["frobnicate"], &dir)), 2);
    assert_eq!(code(&jostlt(&["barrier", "--gamma", "1"], &dir)), 2);
    assert_eq!(code(&jostlt(&["sums", "--spectrum", "x.jsonl", "--kind", "nope"], &dir)), 2);
    assert_eq!(code(&jostlt(&["barrier", "--gamma", "-1", "--R", "10"], &dir)), 2);
    let o = jostlt(&["jost", "--potential", "missing.json", "--z", "1,1"], &dir);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
    assert_eq!(code(&jostlt(&["--help"], &dir)), 0);
}

#[test]
fn barrier_stream_and_manifest() {
    let dir = scratch("barrier");
    let o = jostlt(&["--out", "out", "barrier", "--gamma", "1", "--R", "1200"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let body = std::fs::read(dir.join("out/barrier.jsonl")).unwrap();
    let lines: Vec<Value> =
        std::str::from_utf8(&body).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // M_R = ⌊γR²/(32π log R)⌋
    let m_r = (1200.0f64.powi(2) / (32.0 * std::f64::consts::PI * 1200.0f64.ln())).floor() as usize;
    assert_eq!(lines.len(), m_r);
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l["j"].as_u64().unwrap() as usize, k + 1);
        assert!(l["residual_phi"].as_f64().unwrap() <= 1e-10);
    }
    let manifest = read_json(&dir.join("out/barrier.manifest.json"));
    assert_eq!(manifest["command"], "barrier");
    assert_eq!(manifest["started_unix"], 1_700_000_000u64);
    let outputs = manifest["outputs"].as_array().unwrap();
    let entry = outputs.iter().find(|e| e["path"] == "barrier.jsonl").unwrap();
    assert_eq!(entry["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&body)));
}

#[test]
fn results_do_not_depend_on_threads_or_reruns() {
    let dir = scratch("determinism");
    let run = |out: &str, threads: &str| {
        let o = jostlt(&["--threads", threads, "--out", out, "barrier", "--gamma", "1", "--R", "600", "--all"], &dir);
        assert_eq!(code(&o), 0);
        std::fs::read(dir.join(out).join("barrier.jsonl")).unwrap()
    };
    let a = run("a", "1");
    let b = run("b", "4");
    let c = run("c", "4");
    assert_eq!(a, b);
    assert_eq!(b, c);
    // same threads and SOURCE_DATE_EPOCH: the manifest is reproducible too
    assert_eq!(
        std::fs::read(dir.join("b/barrier.manifest.json")).unwrap(),
        std::fs::read(dir.join("c/barrier.manifest.json")).unwrap()
    );
}

#[test]
fn empty_spectrum_sums_to_zero() {
    let dir = scratch("empty");
    std::fs::write(dir.join("empty.jsonl"), "").unwrap();
    let o = jostlt(&["--out", "out", "sums", "--spectrum", "empty.jsonl", "--kind", "j"], &dir);
    assert_eq!(code(&o), 0);
    let r = read_json(&dir.join("out/sums.json"));
    assert_eq!(r["result"]["value"], 0.0);
    assert_eq!(r["result"]["n_terms"], 0);
}

#[test]
fn sums_read_barrier_output() {
    let dir = scratch("roundtrip");
    assert_eq!(code(&jostlt(&["--out", "b", "barrier", "--gamma", "1", "--R", "1200"], &dir)), 0);
    let o = jostlt(&["--out", "s", "sums", "--spectrum", "b/barrier.jsonl", "--kind", "j"], &dir);
    assert_eq!(code(&o), 0);
    let r = read_json(&dir.join("s/sums.json"));
    assert_eq!(r["result"]["n_terms"], 2020);
    // Im√λ = √((|λ| − Re λ)/2), summed straight from the stream
    let body = std::fs::read_to_string(dir.join("b/barrier.jsonl")).unwrap();
    let oracle: f64 = body
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            let (re, im) = (v["lambda"][0].as_f64().unwrap(), v["lambda"][1].as_f64().unwrap());
            ((re.hypot(im) - re) / 2.0).sqrt()
        })
        .sum();
    let j = r["result"]["value"].as_f64().unwrap();
    assert!((j - oracle).abs() <= 1e-12 * oracle, "{j} vs {oracle}");
}

#[test]
fn output_dir_from_environment() {
    let dir = scratch("env");
    let o = Command::new(env!("CARGO_BIN_EXE_jostlt"))
        .args(["jost", "--potential", r#"{"kind":"barrier","gamma":1,"R":2}"#, "--z", "1,1", "--format", "csv"])
        .current_dir(&dir)
        .env("JOSTLT_OUT", dir.join("from-env"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.join("from-env/jost.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.join("from-env/jost.manifest.json").exists());
}

#[test]
fn failed_bound_exits_1() {
    let dir = scratch("fail");
    // at R = 5 the asymptotic box count is empty, below its lower bound
    let o = jostlt(&["--out", "out", "barrier-check", "--gamma", "1", "--R", "5"], &dir);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL box_count"));
    let o = jostlt(&["--out", "out", "barrier-check", "--gamma", "1", "--R", "1200"], &dir);
    assert_eq!(code(&o), 0);
}

#[test]
fn quick_verification_subset() {
    let dir = scratch("verify");
    let o = jostlt(&["--out", "out", "verify-all", "--quick", "--only", "2,6"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS criterion")).count(), 2);
}
