use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spec2lab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spec2lab"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("SPEC2LAB_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const PAULI_Z: &str = r#"{"dim":2,"re":[1,0,0,-1],"im":[0,0,0,0]}"#;

const TARGET: &str = r#"{"sigma":[[-1,0],[1,2]],"F":{"points":[{"re":-0.5,"im":0},{"re":1.5,"im":0},{"re":0.5,"im":0.8}],"segments":[],"disks":[]}}"#;

#[test]
fn spec2_on_a_window() {
    let dir = scratch("spec2");
    let m = dir.join("t.json");
    fs::write(&m, r#"{"dim":2,"re":[-1,0,0,1],"im":[0,0,0,0]}"#).unwrap();
    let out = run(&dir, &["spec2", "--matrix", m.to_str().unwrap(), "--window", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(dir.join("spec2.json"));
    assert_eq!(v["kind"], "spec2");
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = scratch("usage");
    assert_eq!(code(&run(&dir, &["spec2"])), 2);
    assert_eq!(code(&run(&dir, &["spec2", "--matrix", "/nonexistent/t.json", "--window", "1"])), 2);
    assert_eq!(code(&run(&dir, &["qregion", "--sigma", "0,1,2"])), 2);
    assert_eq!(code(&run(&dir, &["nest", "--interval", "-1", "1", "--r", "0", "--alpha", "0.4,0.5"])), 2);
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"dim":2,"re":[0,1,0,0],"im":[0,0,0,0]}"#).unwrap();
    assert_eq!(code(&run(&dir, &["galerkin", "--matrix", bad.to_str().unwrap(), "--window", "1"])), 2);
    assert_eq!(code(&run(&dir, &["verify", "--report", bad.to_str().unwrap()])), 2);
}

#[test]
fn qregion_points() {
    let dir = scratch("qregion");
    let out = run(&dir, &["qregion", "--sigma", "-1,0,1,2", "--point", "0.5,0.8", "--point", "0.5,0.2"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.join("qregion.json")).unwrap();
    assert!(text.contains("true") && text.contains("false"));
}

#[test]
fn not_dilatable_is_a_check_failure() {
    let dir = scratch("dilate");
    let (b, m) = (dir.join("b.json"), dir.join("m.json"));
    fs::write(&b, PAULI_Z).unwrap();
    fs::write(&m, r#"{"dim":2,"re":[0.999,0,0,1],"im":[0,0,0,0]}"#).unwrap();
    let out = run(&dir, &["dilate", "--b", b.to_str().unwrap(), "--m", m.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = json(dir.join("dilate.json"));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "dilatable" && c["passed"] == false));

    fs::write(&m, r#"{"dim":2,"re":[2,0,0,1],"im":[0,0,0,0]}"#).unwrap();
    let out = run(&dir, &["dilate", "--b", b.to_str().unwrap(), "--m", m.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = run(&dir, &["verify", "--report", dir.join("dilate.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(dir.join("verify.json"))["payload"]["agree"], true);
}

#[test]
fn lemma22_certificate_reverifies() {
    let dir = scratch("lemma22");
    let args = ["lemma22", "--interval", "-2", "2", "--r", "0.5", "--delta", "0.2", "--eps", "0.4", "--n", "16", "--accept-sparse"];
    let first = run(&dir, &args);
    assert!(matches!(code(&first), 0 | 1));
    let out = run(&dir, &["verify", "--report", dir.join("lemma22.json").to_str().unwrap()]);
    assert_eq!(code(&out), code(&first));
    let v = json(dir.join("verify.json"));
    assert_eq!(v["payload"]["agree"], true);
    assert_eq!(v["payload"]["kind"], "lemma22");
}

#[test]
fn plant_output_is_deterministic() {
    let dir = scratch("plant");
    let target = dir.join("target.json");
    fs::write(&target, TARGET).unwrap();
    let args = ["plant", "--target", target.to_str().unwrap(), "--levels", "2"];
    assert_eq!(code(&run(&dir, &args)), 0);
    let first = fs::read(dir.join("plant.json")).unwrap();
    assert_eq!(code(&run(&dir, &args)), 0);
    assert_eq!(fs::read(dir.join("plant.json")).unwrap(), first);

    let threaded = Command::new(env!("CARGO_BIN_EXE_spec2lab"))
        .arg("--out-dir")
        .arg(&dir)
        .args(args)
        .env("SPEC2LAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(code(&threaded), 0);
    assert_eq!(fs::read(dir.join("plant.json")).unwrap(), first);

    let out = run(&dir, &["verify", "--report", dir.join("plant.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(dir.join("verify.json"))["payload"]["agree"], true);
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let dir = scratch("threads");
    let out = Command::new(env!("CARGO_BIN_EXE_spec2lab"))
        .arg("--out-dir")
        .arg(&dir)
        .args(["qregion", "--sigma", "0,1"])
        .env("SPEC2LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn nest_replay_agrees() {
    let dir = scratch("nest");
    let args = ["nest", "--interval", "-1", "1", "--r", "0", "--alpha", "0.5,0.4", "--loose", "--max-dim", "512"];
    let first = run(&dir, &args);
    assert!(matches!(code(&first), 0 | 1));
    let out = run(&dir, &["replay", "--report", dir.join("nest.json").to_str().unwrap()]);
    assert_eq!(code(&out), code(&first));
    assert_eq!(json(dir.join("replay.json"))["payload"]["agree"], true);
}

#[test]
fn svg_is_written_on_request() {
    let dir = scratch("svg");
    let m = dir.join("t.json");
    fs::write(&m, PAULI_Z).unwrap();
    assert_eq!(code(&run(&dir, &["--svg", "spec2", "--matrix", m.to_str().unwrap(), "--window", "1"])), 0);
    let svg = fs::read_to_string(dir.join("spec2.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}
