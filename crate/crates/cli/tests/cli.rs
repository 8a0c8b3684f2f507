use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi")).args(args).output().expect("binary runs")
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p: PathBuf = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_and_reports_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2, 0], [0, -4]]}"#);
    let o = jacobi(&["verify", "--lattice", &l, "--suite", "weil", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o).lines().map(|x| serde_json::from_str(x).unwrap()).collect();
    let summary = lines.last().unwrap();
    assert_eq!(summary["pass"], Value::Bool(true));
    assert_eq!(summary["checks"].as_u64().unwrap() as usize, lines.len() - 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
}

#[test]
fn verify_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2, 1], [1, -4]]}"#);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let o = jacobi(&[
            "verify", "--lattice", &l, "--suite", "characteristics", "--samples", "3", "--seed", "9", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn unreachable_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2]]}"#);
    let o = jacobi(&["verify", "--lattice", &l, "--suite", "periodicity", "--tol", "1e-30", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2]]}"#);
    assert_eq!(jacobi(&["verify", "--lattice", &l, "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(jacobi(&["verify", "--lattice", &l, "--suite", "weil", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(jacobi(&["verify", "--lattice", "/nonexistent.json", "--suite", "weil"]).status.code(), Some(2));
    let odd = write(&dir, "odd.json", r#"{"gram": [[1]]}"#);
    assert_eq!(jacobi(&["verify", "--lattice", &odd, "--suite", "weil"]).status.code(), Some(2));
    assert_eq!(jacobi(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn kernel_invariance_with_explicit_isometry() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2, 0], [0, -4]]}"#);
    let good = write(&dir, "a.json", r#"{"matrix": [[17, 24], [12, 17]]}"#);
    let o = jacobi(&["verify", "--lattice", &l, "--suite", "kernel-invariance", "--isometry", &good, "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = write(&dir, "b.json", r#"{"matrix": [[-1, 0], [0, -1]]}"#);
    let o = jacobi(&["verify", "--lattice", &l, "--suite", "kernel-invariance", "--isometry", &bad]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_theta_values() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2]]}"#);
    let o = jacobi(&["eval", "theta", "--lattice", &l, "--tau", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let even = v["values"][0][0].as_f64().unwrap();
    let odd = v["values"][1][0].as_f64().unwrap();
    assert!((even - 1.0037348854877).abs() < 1e-12);
    assert!((odd - 0.4157606025960).abs() < 1e-12);
    assert_eq!(v["tolerance"].as_f64(), Some(1e-12));

    let t = write(&dir, "t.json", r#"{"gram": []}"#);
    let o = jacobi(&["eval", "theta", "--lattice", &t, "--tau", "0.3,0.7"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["values"], serde_json::json!([[1.0, 0.0]]));
}

#[test]
fn eval_jacobi_checks_the_representation() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[-2]]}"#);
    let body = |rep: &str| {
        format!(
            r#"{{"den": 4, "weight": [1, 0], "rep": "{rep}", "coeffs": [
                {{"coset": 0, "num": 0, "exp_den": 1, "re": 1.0, "im": 0.0}},
                {{"coset": 1, "num": 1, "exp_den": 4, "re": 2.0, "im": 0.0}},
                {{"coset": 0, "num": 1, "exp_den": 1, "re": 2.0, "im": 0.0}}]}}"#
        )
    };
    let wrong = write(&dir, "w.json", &body("rho"));
    let o = jacobi(&["eval", "jacobi", "--lattice", &l, "--tau", "0,1", "--form", &wrong]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("representation"));
    let right = write(&dir, "r.json", &body("rho_star"));
    let o = jacobi(&["eval", "jacobi", "--lattice", &l, "--tau", "0.1,1.2", "--zeta", "[[0.2,0.05]]", "--form", &right]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["weight2"], serde_json::json!([1, 1]));
}

#[test]
fn eval_contraction_and_theta_lm_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(&dir, "l.json", r#"{"gram": [[2, 0], [0, -4]]}"#);
    let m = write(&dir, "m.json", r#"{"basis": [[1], [0]]}"#);
    let o = jacobi(&["eval", "theta-lm", "--lattice", &l, "--sublattice", &m, "--tau", "0,1", "--zeta", "[[0.1,0.0]]"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["values"].as_array().unwrap().len(), 8);
    assert_eq!(v["values"][0].as_array().unwrap().len(), 2);

    let form = write(
        &dir,
        "f.json",
        r#"{"den": 1, "weight": [0, 1], "rep": "rho_star", "coeffs": [{"coset": 0, "num": 0, "exp_den": 1, "re": 1.0, "im": 0.0}]}"#,
    );
    let o = jacobi(&["eval", "contraction", "--lattice", &l, "--sublattice", &m, "--form", &form, "--tau", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["values"].as_array().unwrap().len(), 2);
    let missing = jacobi(&["eval", "contraction", "--lattice", &l, "--form", &form, "--tau", "0,1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn product_table_and_decomposition() {
    let o = jacobi(&["product-decompose", "--m", "1", "--n", "1", "--q-prec", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let table = v["table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    assert_eq!(table[0]["terms"][0]["display"], "1 + 2q^2 + 2q^8 + 2q^18 + O(q^20)");

    let dir = tempfile::tempdir().unwrap();
    let one = r#"{"den": 1, "bound": [10, 1], "terms": [{"exp": [0, 1], "coeff": "1"}]}"#;
    let zero = r#"{"den": 1, "bound": [10, 1], "terms": []}"#;
    let f = write(&dir, "f.json", &format!("[{one}, {zero}]"));
    let h = write(&dir, "h.json", &format!("[{one}, {zero}]"));
    let o = jacobi(&["product-decompose", "--m", "1", "--n", "1", "--q-prec", "10", "--f", &f, "--h", &h]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 4);
    assert_eq!(v["components"][0]["display"], "1 + 2q^2 + 2q^8 + O(q^10)");
    assert_eq!(jacobi(&["product-decompose", "--m", "1", "--n", "1", "--f", &f]).status.code(), Some(2));
    assert_eq!(jacobi(&["product-decompose", "--m", "0", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn conjecture_scan_summary() {
    let o = jacobi(&["conjecture-scan", "--m-max", "2", "--n-max", "2", "--q-prec", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let last: Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(last["coefficients"], last["matched"]);
}
