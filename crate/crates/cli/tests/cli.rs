use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dumbbell"));
    cmd.args(args).arg("--out").arg(dir.join("out"));
    if let Some(c) = config {
        let path = dir.join("config.json");
        std::fs::write(&path, c).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn column(csv: &str, col: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn limit_ep1_writes_spectrum_with_zero_first_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": "ep1", "rho": {"constant": 1}, "L": 12, "P1": 3.5449, "P2": 3.5449, "N": 4096, "k": 5}"#;
    let out = run(&["limit"], Some(cfg), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mu = column(&read(dir.path(), "spectrum.csv"), 1);
    assert_eq!(mu.len(), 6);
    assert!(mu[0].abs() < 1e-10);
    assert!(mu.windows(2).all(|w| w[0] < w[1]));
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "limit");
    assert_eq!(manifest["config"]["N"], 4096);
}

#[test]
fn limit_roots_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["limit"], Some(r#"{"problem": "roots", "L": 12, "k": 3}"#), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let w = column(&read(dir.path(), "roots.csv"), 1);
    assert_eq!(w.len(), 3);
    // quoted as ~0.2035; read "~" as 1% relative
    assert!((w[0] / 0.2035 - 1.0).abs() < 0.01, "{w:?}");
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [
        ("limit", r#"{"problem": "ep1", "L": -1}"#),
        ("fem", "{ not json"),
        ("fem", r#"{"domain": "disk", "unknown_key": 1}"#),
        ("sweep", r#"{"eps": [0.2, 0.1]}"#),
        ("sweep", r#"{"eps": [0.1, 0.2, 0.05]}"#),
        ("counterexample", r#"{"L": 0}"#),
        ("mesh", r#"{"domain": "dumbbell", "n_y": 3}"#),
    ] {
        let out = run(&[cmd], Some(cfg), dir.path());
        assert_eq!(out.status.code(), Some(2), "{cmd} {cfg}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["limit", "--threads", "0"], None, dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fem_unit_disk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"domain": "disk", "h": 0.05, "k": 6, "problem": "steklov"}"#;
    let out = run(&["fem"], Some(cfg), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = column(&read(dir.path(), "steklov.csv"), 1);
    assert_eq!(s.len(), 7);
    assert!((s[1] - 1.0).abs() <= 0.02 && (s[2] - 1.0).abs() <= 0.02, "{s:?}");
    assert!(dir.path().join("out/mesh.json").exists());
}

#[test]
fn fem_dumbbell_has_zero_first_value_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"domain": "dumbbell", "L": 4, "eps": 0.1, "h": 0.1, "k": 3, "traces": true}"#;
    let out = run(&["fem"], Some(cfg), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = column(&read(dir.path(), "steklov.csv"), 1);
    assert!(s[0].abs() <= 1e-9);
    let mu = column(&read(dir.path(), "neumann.csv"), 1);
    assert_eq!(mu.len(), 3);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "steklov.json")).unwrap();
    assert_eq!(json["traces"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_with_k_zero_has_only_constant_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"eps": [0.3, 0.2, 0.1], "k": 0, "h": 0.125, "neumann": false}"#;
    let out = run(&["sweep"], Some(cfg), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "sweep.csv");
    assert!(csv.starts_with("eps,sigma_0,mu_1,area,perimeter\n"), "{csv}");
    assert!(column(&csv, 1).iter().all(|s| s.abs() <= 1e-9));
    for f in ["sweep.json", "plot_data.csv", "fits.csv", "manifest.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn default_sweep_fits_linear_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep"], None, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let fits = read(dir.path(), "fits.csv");
    let gamma = column(&fits, 1);
    assert!((0.9..=1.1).contains(&gamma[0]), "{fits}");
}

#[test]
fn counterexample_limit_and_fem() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["counterexample"], Some(r#"{"L": 12}"#), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "counterexample.json")).unwrap();
    assert_eq!(report["limit"]["f_positive"], true);
    assert_eq!(report["limit"]["alpha_bound_holds"], true);
    assert!(read(dir.path(), "summary.txt").contains("limit chain            : holds"));

    let out = run(&["counterexample"], Some(r#"{"L": 12, "fem": true, "eps": [0.1, 0.05]}"#), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "counterexample.json")).unwrap();
    let fem = report["fem"].as_array().unwrap();
    assert_eq!(fem.len(), 2);
    assert!(fem.iter().any(|r| r["verdict"] == true));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["limit", "--seed", "99"], Some(r#"{"problem": "roots", "k": 2, "seed": 5}"#), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["seed"], 99);
}

#[test]
fn mesh_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["mesh"], Some(r#"{"domain": "rectangle", "width": 2, "height": 1, "h": 0.25}"#), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mesh: serde_json::Value = serde_json::from_str(&read(dir.path(), "mesh.json")).unwrap();
    assert_eq!(mesh["nodes"].as_array().unwrap().len(), 9 * 5);
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert!((manifest["notes"]["measures"]["area"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = r#"{"eps": [0.3, 0.2, 0.1], "k": 2, "h": 0.125, "seed": 3}"#;
    for d in [&a, &b] {
        let out = run(&["sweep"], Some(cfg), d.path());
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["sweep.csv", "sweep.json", "plot_data.csv", "fits.csv", "manifest.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
}
