use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn polaron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polaron"))
        .args(args)
        .output()
        .expect("run polaron")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &str, cfg: &Path, out: &Path) -> Output {
    polaron(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/pekar_state.schema.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Strip `#` lines, return the table rows of the first table.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_default_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "default.json", "{}");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));

    let out = run("solve", &cfg, &a);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run("solve", &cfg, &b);
    assert_eq!(out.status.code(), Some(0));

    for file in ["pekar_state.json", "profiles.csv"] {
        let x = fs::read(a.join(file)).unwrap();
        let y = fs::read(b.join(file)).unwrap();
        assert!(x == y, "{file} differs between identical runs");
    }

    let state: Value = serde_json::from_slice(&fs::read(a.join("pekar_state.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&state).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");

    // content hash covers the document without itself
    let mut stripped = state.clone();
    let claimed = stripped.as_object_mut().unwrap().remove("content_sha256").unwrap();
    let recomputed = polaron_core::report::sha256_hex(serde_json::to_string(&stripped).unwrap().as_bytes());
    assert_eq!(claimed.as_str().unwrap(), recomputed);

    let profiles = fs::read_to_string(a.join("profiles.csv")).unwrap();
    assert!(profiles.contains("r,psi,rho,Phi\n"));
    assert!(profiles.contains("p,psi_hat,dpsi_hat,phi\n"));
    assert!(profiles.lines().any(|l| l.starts_with("# config_sha256 ")));
    let rows = csv_rows(&profiles);
    assert_eq!(rows.len(), 3000);
    // 17 significant digits
    assert_eq!(rows[0][1].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn invalid_config_exits_2_and_names_field() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "bad.json", r#"{"grid.n": 0}"#);
    let out = run("solve", &cfg, &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.n"));

    let cfg = config(tmp.path(), "eps.json", r#"{"cutoff.eps_list": [0.1, 0.5]}"#);
    let out = run("massbound", &cfg, &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cutoff.eps_list"));

    let out = run("verify", &tmp.path().join("missing.json"), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convergence_failure_exits_3_with_history() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "short.json", r#"{"grid.n": 1200, "solver.max_iter": 3}"#);
    let dir = tmp.path().join("o");
    let out = run("solve", &cfg, &dir);
    assert_eq!(out.status.code(), Some(3));
    let history = fs::read_to_string(dir.join("residual_history.csv")).unwrap();
    assert!(history.contains("iteration,energy,energy_change,psi_change,eigenvalue\n"));
    assert_eq!(csv_rows(&history).len(), 3);
    assert!(!dir.join("pekar_state.json").exists());
}

#[test]
fn verify_default_and_coarse() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("v");
    let out = run("verify", &config(tmp.path(), "d.json", "{}"), &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.join("verify.csv")).unwrap();
    assert!(table.contains("check_name,computed,expected,tolerance,pass\n"));
    let rows = csv_rows(&table);
    assert!(rows.iter().all(|r| r[4] == "true"));
    let q = rows.iter().find(|r| r[0] == "Q1-Q2=3").expect("Q1-Q2=3 row");
    assert_eq!(q[2].parse::<f64>().unwrap(), 3.0);

    let dir = tmp.path().join("c");
    let out = run("verify", &config(tmp.path(), "c.json", r#"{"grid.n": 100}"#), &dir);
    assert_eq!(out.status.code(), Some(1));
    let rows = csv_rows(&fs::read_to_string(dir.join("verify.csv")).unwrap());
    assert!(rows.iter().any(|r| r[4] == "false"));
}

#[test]
fn massbound_sweep_table() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("m");
    let out = run("massbound", &config(tmp.path(), "d.json", "{}"), &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("massbound.csv")).unwrap();
    assert!(text.contains("eps,R,Q1,Q2,f,m_lower\n"));
    let rows: Vec<Vec<f64>> = csv_rows(&text)
        .iter()
        .map(|r| r.iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4][0], 0.0);
    assert!(rows[4][4].abs() < 2e-2);
    for w in rows.windows(2) {
        assert!(w[1][4].abs() <= w[0][4].abs());
        assert!(w[1][5] >= w[0][5]);
    }
}

#[test]
fn out_flag_overrides_config_dir() {
    let tmp = TempDir::new().unwrap();
    let from_cfg = tmp.path().join("from-config");
    let text = format!(r#"{{"grid.n": 1200, "output.dir": {:?}}}"#, from_cfg.to_str().unwrap());
    let cfg = config(tmp.path(), "o.json", &text);
    let out = polaron(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(from_cfg.join("pekar_state.json").exists());
}
