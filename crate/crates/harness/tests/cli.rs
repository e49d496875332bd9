use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn asep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asep")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const COUPLING: &str = "kind = verify-coupling\nrho = 0.25\nt = 10\nreplicas = 5\nobserve = 10\nseed = 4\n";

#[test]
fn validate_echoes_a_normalized_config() {
    let dir = scratch("validate");
    let out = asep(&["validate", &write_config(&dir, COUPLING)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("kernel = 1:1\n"));
    assert!(text.contains("times = 1,2,3,4,5,6,7,8,9,10\n"));
}

#[test]
fn invalid_configs_exit_with_three() {
    let dir = scratch("invalid");
    let out = asep(&["validate", &write_config(&dir, &COUPLING.replace("0.25", "1.2"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("rho"));

    let empty = "kind = lln\nkernel =\nrho = 0.25\nt = 10\nreplicas = 10\n";
    let out = asep(&["run", &write_config(&dir, empty), "--out", dir.join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let m = manifest(&dir.join("out"));
    assert_eq!(m["status"], "invalid");
    assert!(m["error"].as_str().unwrap().contains("kernel"));
    assert!(m["config"].as_str().unwrap().contains("kernel =\n"));
}

#[test]
fn passing_run_writes_every_file() {
    let dir = scratch("pass");
    let out_dir = dir.join("out");
    let out = asep(&["run", &write_config(&dir, COUPLING), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let m = manifest(&out_dir);
    assert_eq!(m["status"], "pass");
    assert_eq!(m["audit"]["violations"], 0);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"], COUPLING);
    assert_eq!(m["criteria"].as_array().unwrap().len(), 2);
    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(csv.starts_with("t,estimate,stderr,n\n"));
    assert_eq!(csv.lines().count(), 11);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["envelope_mismatches"], 0);
}

#[test]
fn failed_criterion_exits_with_one() {
    let dir = scratch("fail");
    let text = "kind = lln\nrho = 0.25\nt = 20\nreplicas = 10\ntolerance = 1e-9\nmargin = cone:1\n";
    let out_dir = dir.join("out");
    let out = asep(&["run", &write_config(&dir, text), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(manifest(&out_dir)["status"], "fail");
}

#[test]
fn uncertified_run_is_inconclusive() {
    let dir = scratch("inconclusive");
    let text = "kind = current\nrho = 0.3\nt = 30\nreplicas = 20\nmargin = fixed:0\n";
    let out_dir = dir.join("out");
    let out = asep(&["run", &write_config(&dir, text), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    let m = manifest(&out_dir);
    assert_eq!(m["status"], "inconclusive");
    assert!(m["audit"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = scratch("repeat");
    let text = "kind = current\nrho = 0.3\nt = 30\nreplicas = 40\nseed = 9\noutput = ignored\n";
    let config = write_config(&dir, text);
    // The verdict at this horizon is beside the point; only sameness is.
    let codes: Vec<_> = [("a", "1"), ("b", "1"), ("c", "3")]
        .iter()
        .map(|(name, workers)| {
            asep(&["run", &config, "--out", dir.join(name).to_str().unwrap(), "--workers", workers]).status.code()
        })
        .collect();
    assert!(codes.iter().all(|&c| c == codes[0] && c != Some(3)), "{codes:?}");
    for file in ["results.csv", "summary.json"] {
        let a = fs::read(dir.join("a").join(file)).unwrap();
        assert_eq!(a, fs::read(dir.join("b").join(file)).unwrap(), "{file}");
        assert_eq!(a, fs::read(dir.join("c").join(file)).unwrap(), "{file}");
    }
    assert_eq!(manifest(&dir.join("c"))["workers"], 3);
    assert!(!dir.join("ignored").exists());
}
