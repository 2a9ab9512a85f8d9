use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn triwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triwit"))
        .args(args)
        .env_remove("TRIWIT_SEED")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = triwit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const GHZ2: &str = r#"{"dims":[2,2,2],"data":[[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;
const W_FLAGS: [&str; 6] = ["--s", "0,1,1,1", "--t", "0,1,1,1", "--u", "-1:0,0,0,0"];

#[test]
fn sr_of_ghz_and_product() {
    let dir = TempDir::new().unwrap();
    let ghz = write(dir.path(), "ghz.json", GHZ2);
    let r = ok_json(&["sr", s(&ghz)]);
    assert_eq!(r["results"]["display"], "(2,2,2)");
    assert_eq!(r["results"]["in_sigma"], true);
    assert_eq!(r["command"]["name"], "sr");
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);

    let prod = write(
        dir.path(),
        "prod.json",
        r#"{"dims":[2,2,2],"data":[[0.5,0],[0.5,0],[0,0],[0,0],[0.5,0],[0.5,0],[0,0],[0,0]]}"#,
    );
    let r = ok_json(&["sr", s(&prod)]);
    assert_eq!(r["results"]["schmidt_rank"], serde_json::json!([1, 1, 1]));
}

#[test]
fn sr_wrong_dims_exits_2() {
    let dir = TempDir::new().unwrap();
    let ghz = write(dir.path(), "ghz.json", GHZ2);
    let out = triwit(&["sr", s(&ghz), "--dims", "2,2,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(triwit(&["sr", s(&bad)]).status.code(), Some(2));
    assert_eq!(triwit(&["sr", "/nonexistent/file.json"]).status.code(), Some(2));
}

fn verdicts(r: &Value) -> Vec<(String, String)> {
    r["results"]["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["class"].as_str().unwrap().to_string(), c["verdict"].as_str().unwrap().to_string()))
        .collect()
}

fn certified(r: &Value) -> Vec<bool> {
    verdicts(r).into_iter().map(|(_, v)| v == "certified").collect()
}

#[test]
fn classify_family_patterns() {
    let cases = [
        ("0,1,1,2", [false, true, false, false, true]),
        ("0,0,2,2", [false, true, true, false, true]),
        ("0,0,0,4", [false, false, false, false, true]),
        ("0,2,2,2", [false, true, true, true, true]),
    ];
    for (roots, expected) in cases {
        let r = ok_json(&["classify", "--s", roots, "--t", roots, "--u", "1,0:1,-1,0:-1"]);
        assert_eq!(certified(&r), expected, "{roots}");
    }
    let classes: Vec<String> = verdicts(&ok_json(&["classify", "--s", "1,1,1,1", "--t", "1,1,1,1"]))
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    assert_eq!(classes, ["(2,2,2)", "(1,2,2)", "(2,1,2)", "(2,2,1)", "(1,1,1)"]);
}

#[test]
fn classify_w_and_defaults() {
    let r = ok_json(&[&["classify"], &W_FLAGS[..]].concat());
    assert_eq!(r["results"]["biseparability_witness"], true);
    assert_eq!(r["results"]["classes"][0]["evidence"]["kind"], "failed_index");

    let r = ok_json(&["classify", "--s", "1,2,0,1", "--t", "1,0,3,1"]);
    assert_eq!(certified(&r), vec![true; 5]);
}

#[test]
fn classify_rejects_negative_params() {
    let out = triwit(&["classify", "--s", "-1,1,1,1", "--t", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = triwit(&["classify", "--s", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pair_ghz_with_w() {
    let dir = TempDir::new().unwrap();
    let ghz = write(dir.path(), "ghz.json", GHZ2);
    let r = ok_json(&[&["pair", s(&ghz)], &W_FLAGS[..]].concat());
    assert!((r["results"]["real"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(r["results"]["imag"].as_f64().unwrap(), 0.0);
}

fn diag_matrix_json(diag: &[f64], dims: Option<[usize; 3]>) -> String {
    let n = diag.len();
    let data: Vec<[f64; 2]> = (0..n * n)
        .map(|k| if k / n == k % n { [diag[k / n], 0.0] } else { [0.0, 0.0] })
        .collect();
    let mut v = serde_json::json!({ "rows": n, "cols": n, "data": data });
    if let Some(d) = dims {
        v["dims"] = serde_json::json!(d);
    }
    v.to_string()
}

fn matrix_json(n: usize, f: impl Fn(usize, usize) -> [f64; 2], dims: [usize; 3]) -> String {
    let data: Vec<[f64; 2]> = (0..n * n).map(|k| f(k / n, k % n)).collect();
    serde_json::json!({ "dims": dims, "rows": n, "cols": n, "data": data }).to_string()
}

#[test]
fn pair_mixed_state_with_hadamard_map() {
    // Hadamard map on M_2: Choi = Σ |iii><jjj|
    let dir = TempDir::new().unwrap();
    let mixed = write(dir.path(), "mixed.json", &diag_matrix_json(&[0.125; 8], Some([2, 2, 2])));
    let had = write(
        dir.path(),
        "had.json",
        &matrix_json(8, |p, q| if (p == 0 || p == 7) && (q == 0 || q == 7) { [1.0, 0.0] } else { [0.0, 0.0] }, [2, 2, 2]),
    );
    let r = ok_json(&["pair", s(&mixed), s(&had)]);
    assert!((r["results"]["real"].as_f64().unwrap() - 0.25).abs() < 1e-15);

    // matrix files without dims take them from --dims
    let nodims = write(dir.path(), "nodims.json", &diag_matrix_json(&[0.125; 8], None));
    let r = ok_json(&["pair", s(&nodims), s(&had), "--dims", "2,2,2"]);
    assert!((r["results"]["real"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn pair_mismatched_dims_exits_2() {
    let dir = TempDir::new().unwrap();
    let small = write(dir.path(), "small.json", &diag_matrix_json(&[0.5, 0.5], Some([1, 1, 2])));
    let out = triwit(&[&["pair", s(&small)], &W_FLAGS[..]].concat());
    assert_eq!(out.status.code(), Some(2));
    let ghz = write(dir.path(), "ghz.json", GHZ2);
    let out = triwit(&["pair", s(&ghz)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_w() {
    let r = ok_json(&[&["search", "--sr", "2,2,2"], &W_FLAGS[..]].concat());
    assert_eq!(r["results"]["found"], true);
    assert!((r["results"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-6);

    let r = ok_json(&[&["search", "--sr", "1,2,2"], &W_FLAGS[..]].concat());
    assert_eq!(r["results"]["found"], false);
    assert_eq!(r["results"]["status"], "no violation found");
    assert!(r["results"]["best_value"].as_f64().unwrap() >= -1e-6);
}

#[test]
fn search_negative_identity_and_certificate_round_trip() {
    let dir = TempDir::new().unwrap();
    let neg = write(dir.path(), "neg.json", &diag_matrix_json(&[-1.0; 8], Some([2, 2, 2])));
    let r = ok_json(&["search", s(&neg), "--sr", "1,1,1", "--restarts", "3"]);
    assert_eq!(r["results"]["found"], true);
    assert!((r["results"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(r["results"]["schmidt_rank"], serde_json::json!([1, 1, 1]));

    // the certificate vector is accepted by sr
    let cert = write(dir.path(), "cert.json", &r["results"]["vector"].to_string());
    let back = ok_json(&["sr", s(&cert)]);
    assert_eq!(back["results"]["schmidt_rank"], serde_json::json!([1, 1, 1]));
}

#[test]
fn search_non_hermitian_exits_3() {
    let dir = TempDir::new().unwrap();
    let m = write(
        dir.path(),
        "nh.json",
        &matrix_json(8, |p, q| if p == 0 && q == 1 { [1.0, 0.0] } else { [0.0, 0.0] }, [2, 2, 2]),
    );
    let out = triwit(&["search", s(&m), "--sr", "1,1,1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let o = triwit(&["gen", "--sr", "2,2,3", "--dims", "2,2,3", "--out", s(&out)]);
    assert!(o.status.success());
    let r = ok_json(&["sr", s(&out)]);
    assert_eq!(r["results"]["display"], "(2,2,3)");

    let o = triwit(&["gen", "--sr", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = triwit(&["gen", "--sr", "3,3,3", "--dims", "2,2,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_sample_state() {
    let rho = ok_json(&["gen", "--sample", "--sr", "1,2,2", "--dims", "2,2,2", "--terms", "5", "--seed", "3"]);
    assert_eq!(rho["rows"], 8);
    let data = rho["data"].as_array().unwrap();
    let trace: f64 = (0..8).map(|i| data[i * 9][0].as_f64().unwrap()).sum();
    assert!((trace - 1.0).abs() < 1e-10);

    // the sampled state is separable across A|BC, so W pairs nonnegatively with it
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "rho.json", &rho.to_string());
    let r = ok_json(&[&["pair", s(&f)], &W_FLAGS[..]].concat());
    assert!(r["results"]["real"].as_f64().unwrap() >= -1e-8);
}

#[test]
fn reports_are_deterministic() {
    let args = [&["search", "--sr", "1,2,2", "--restarts", "4", "--seed", "11"], &W_FLAGS[..]].concat();
    let a = triwit(&args);
    let b = triwit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let g1 = triwit(&["gen", "--sample", "--sr", "2,2,2", "--terms", "3", "--seed", "5"]);
    let g2 = Command::new(env!("CARGO_BIN_EXE_triwit"))
        .args(["gen", "--sample", "--sr", "2,2,2", "--terms", "3"])
        .env("TRIWIT_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(g1.stdout, g2.stdout);
}

#[test]
fn tolerance_block_echoes_flags() {
    let r = ok_json(&["classify", "--s", "1,1,1,1", "--t", "1,1,1,1", "--tol-ineq", "1e-6"]);
    assert_eq!(r["tolerance"]["ineq_abs"].as_f64(), Some(1e-6));
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    let out = triwit(&["classify", "--s", "1,1,1,1", "--t", "1,1,1,1", "--tol-rank", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
