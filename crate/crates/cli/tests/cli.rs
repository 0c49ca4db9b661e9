use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn focklab(sub: &str, config: &str, out: &Path) -> i32 {
    let cfg = out.with_extension("config.json");
    fs::write(&cfg, config).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_focklab"))
        .args([sub, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    status.code().expect("exited normally")
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn gaussian_norm_of_cube() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let code = focklab("norm", r#"{"weight": "gaussian", "f": "z^3", "p": 2}"#, &out);
    assert_eq!(code, 0);
    let doc = read_json(out.join("norm.json"));
    let got = doc["result"]["log_value"].as_f64().unwrap();
    let want = 0.5 * (6.0 * std::f64::consts::PI).ln();
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    assert_eq!(doc["status"], "ok");
}

#[test]
fn volterra_above_threshold_is_unbounded() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let code = focklab("classify-vg", r#"{"weight": "power:4", "g": "z^5", "p": "inf"}"#, &out);
    assert_eq!(code, 3);
    let doc = read_json(out.join("classify-vg.json"));
    assert_eq!(doc["result"]["bounded"], false);
    let csv = fs::read_to_string(out.join("classify-vg.profile.csv")).unwrap();
    assert!(csv.starts_with("r,log_value\n"));
    assert!(csv.lines().count() > 10);
}

#[test]
fn batch_reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let batch = r#"[
        {"name": "g4", "weight": "power:4", "g": "z^4", "p": "inf"},
        {"name": "g2", "weight": "exp:1", "g": [[0, 0], [1, 0], [0.5, -0.5]], "p": 2},
        {"name": "trunc", "weight": "exp:1", "g": "exp:0.5", "p": "inf"}
    ]"#;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let code = focklab("classify-vg", batch, &a);
    assert_eq!(focklab("classify-vg", batch, &b), code);
    let first = dir_contents(&a);
    assert_eq!(first.len(), 6);
    assert_eq!(first, dir_contents(&b));
    focklab("classify-vg", batch, &a);
    assert_eq!(first, dir_contents(&a));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    for (i, cfg) in [
        "{not json",
        r#"{"weight": "cubic", "f": "z", "p": 2}"#,
        r#"{"weight": "gaussian", "f": "w^2", "p": 2}"#,
        r#"{"weight": "gaussian", "f": "z", "p": -1}"#,
        r#"{"weight": "gaussian", "f": "z", "p": 2, "colour": 1}"#,
        r#"[{"name": "x", "weight": "gaussian"}, {"name": "x", "weight": "gaussian"}]"#,
        r#"{"operation": "covering", "weight": "gaussian", "f": "z", "p": 2}"#,
    ]
    .iter()
    .enumerate()
    {
        let out = tmp.path().join(format!("bad{i}"));
        assert_eq!(focklab("norm", cfg, &out), 2, "{cfg}");
    }
    // a missing field is reported in the result document
    let out = tmp.path().join("missing");
    assert_eq!(focklab("norm", r#"{"weight": "gaussian", "p": 2}"#, &out), 2);
    let doc = read_json(out.join("norm.json"));
    assert_eq!(doc["status"], "config_error");
    assert!(doc["error"].as_str().unwrap().contains("`f`"));
}

#[test]
fn covering_writes_lattice_and_refuses_oversized_regions() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("small");
    assert_eq!(focklab("covering", r#"{"weight": "power:4", "params": {"region_radius": 1.2}}"#, &out), 0);
    let doc = read_json(out.join("covering.json"));
    assert_eq!(doc["result"]["report"]["coverage"], true);
    let lattice = fs::read_to_string(out.join("covering.lattice.csv")).unwrap();
    assert!(lattice.starts_with("x,y,t\n"));
    assert_eq!(
        lattice.lines().count() - 1,
        doc["result"]["report"]["centers"].as_u64().unwrap() as usize
    );

    let out = tmp.path().join("large");
    assert_eq!(focklab("covering", r#"{"weight": "power:4", "params": {"region_radius": 15}}"#, &out), 5);
    let doc = read_json(out.join("covering.json"));
    assert!(doc["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn symbolic_and_witness_operations() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let cfg = r#"{"weight": "power:4", "g": "c:2", "p": 2, "q": 2, "params": {"operator": "Mg"}}"#;
    assert_eq!(focklab("verdict-igmg", cfg, &out), 0);
    assert_eq!(read_json(out.join("verdict-igmg.json"))["result"]["compact"], false);

    let cfg = r#"{"weight": "power:4", "g": "z", "p": 2, "params": {"n_range": [1, 30]}}"#;
    assert_eq!(focklab("witness-mg", cfg, &out), 3);
    assert_eq!(read_json(out.join("witness-mg.json"))["result"]["unbounded_corroborated"], true);

    let cfg = r#"{"weight": "power:4", "p": 2, "q": 4, "params": {"n_range": [1, 30]}}"#;
    assert_eq!(focklab("inclusion-diagnostic", cfg, &out), 0);
    assert!(out.join("inclusion-diagnostic.profile.csv").exists());
}

#[test]
fn weight_and_local_checks() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(focklab("weight-check", r#"{"weight": "superexp:1"}"#, &out), 0);
    let doc = read_json(out.join("weight-check.json"));
    assert_eq!(doc["result"]["verdict"], true);
    assert!(out.join("weight-check.ln_tau.csv").exists());

    let cfg = r#"{"weight": "power:4", "p": 2, "params": {"samples": 20, "k": 2}}"#;
    assert_eq!(focklab("local-checks", cfg, &out), 0);
    let doc = read_json(out.join("local-checks.json"));
    assert_eq!(doc["result"]["equivalence"]["agree"], true);
}

#[test]
fn verify_all_emits_a_complete_manifest() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let status = Command::new(env!("CARGO_BIN_EXE_focklab"))
        .args(["verify-all", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let manifest = read_json(out.join("verify-all.manifest.json"));
    assert_eq!(manifest["missing"].as_array().unwrap().len(), 0);
    let ops = manifest["manifest"].as_object().unwrap();
    assert!(ops.len() >= 30);
    assert!(ops.values().all(|checks| !checks.as_array().unwrap().is_empty()));
}
