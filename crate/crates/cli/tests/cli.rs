use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ghspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghspace"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .env("RUST_LIB_BACKTRACE", "0")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = ghspace(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ghspace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, json: &str) -> String {
    std::fs::write(path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn segment(path: &Path, len: f64) -> String {
    write(path, &format!(r#"{{"labels":["p","q"],"dist":[[0,{len}],[{len},0]]}}"#))
}

#[test]
fn spider_has_one_center_and_grid_points_per_leg() {
    let v = ok_json(&["gen", "spider", "--a", "0.3,0.07", "--grid", "8"]);
    assert_eq!(v["space"]["labels"].as_array().unwrap().len(), 3 * 8 + 1);
    assert_eq!(v["layout"].as_array().unwrap().len(), 3 * 8 + 1);
}

#[test]
fn spider_rejects_out_of_range_coordinates() {
    let out = ghspace(&["gen", "spider", "--a", "0.9"]);
    assert!(!out.status.success());
}

#[test]
fn gh_of_segments_is_half_the_length_difference() {
    let x = segment(&scratch("seg1.json"), 1.0);
    let y = segment(&scratch("seg3.json"), 3.0);
    let v = ok_json(&["dist", "gh", &x, &y]);
    assert_eq!(v["exact"], 1.0);
    assert_eq!(v["lower"], 1.0);
}

#[test]
fn gh_reads_a_spider_file_directly() {
    let path = scratch("spider.json");
    let out = ghspace(&["gen", "spider", "--a", "0.3", "--grid", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let s = path.to_str().unwrap();
    let v = ok_json(&["dist", "gh", s, s]);
    assert_eq!(v["exact"], 0.0);
}

#[test]
fn product_and_glue_sizes() {
    let x = segment(&scratch("px.json"), 1.0);
    let y = write(&scratch("py.json"), r#"{"labels":["a","b","c"],"dist":[[0,1,1],[1,0,1],[1,1,0]]}"#);
    let p = ok_json(&["gen", "product", &x, &y]);
    assert_eq!(p["labels"].as_array().unwrap().len(), 6);
    let g = ok_json(&["gen", "glue", &x, &y, "--px", "q", "--py", "a"]);
    assert_eq!(g["labels"].as_array().unwrap().len(), 4);
}

#[test]
fn hausdorff_between_labeled_subsets() {
    let z = write(&scratch("line.json"), r#"{"labels":["a","b","c"],"dist":[[0,1,3],[1,0,2],[3,2,0]]}"#);
    let v = ok_json(&["dist", "hausdorff", &z, "--a", "a", "--b", "b,c"]);
    assert_eq!(v["hausdorff"], 3.0);
}

#[test]
fn invalid_space_is_reported() {
    let bad = write(&scratch("bad.json"), r#"{"labels":["a","b"],"dist":[[0,1],[2,0]]}"#);
    let out = ghspace(&["dist", "gh", &bad, &bad]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("d(0,1) != d(1,0)"));
}

#[test]
fn generated_rough_isometry_yields_a_bound() {
    let path = scratch("rough.json");
    assert!(ghspace(&["gen", "rough", "--seed", "4", "--out", path.to_str().unwrap()]).status.success());
    let v = ok_json(&["dist", "pgh-bound", "--cert", path.to_str().unwrap()]);
    let bound = v["bound"].as_f64().unwrap();
    let eps = v["eps"].as_f64().unwrap();
    assert!(bound >= 2.0 * eps && bound <= 0.5);
}

#[test]
fn tampered_rough_isometry_is_rejected() {
    let path = scratch("tampered.json");
    assert!(ghspace(&["gen", "rough", "--seed", "4", "--out", path.to_str().unwrap()]).status.success());
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["cert"]["eps"] = Value::from(1e-9);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = ghspace(&["dist", "pgh-bound", "--cert", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a rough isometry"));
}

#[test]
fn sine_curve_starts_at_a_single_point() {
    let v = ok_json(&["gen", "sine", "--n", "0"]);
    assert_eq!(v["labels"].as_array().unwrap().len(), 1);
    let v = ok_json(&["gen", "sine", "--n", "2", "--samples", "16"]);
    assert_eq!(v["labels"].as_array().unwrap().len(), 16);
}

#[test]
fn random_spaces_are_reproducible() {
    assert_eq!(ok_json(&["gen", "random", "--seed", "4"]), ok_json(&["gen", "random", "--seed", "4"]));
}

#[test]
fn verify_reports_and_sets_exit_code() {
    let v = ok_json(&["verify", "gh-axioms", "--trials", "10", "--seed", "1"]);
    assert_eq!(v["suite"], "gh-axioms");
    assert_eq!(v["passed"], 10);
    assert!(!ghspace(&["verify", "no-such-suite"]).status.success());
}

#[test]
fn default_sweep_writes_one_row_per_off_anchor_point() {
    let csv = scratch("sweep.csv");
    let v = ok_json(&["sweep", "--grid", "8", "--out", csv.to_str().unwrap()]);
    assert_eq!(v["rows"], 62);
    assert!((1..=3).contains(&v["k"].as_u64().unwrap()));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s1,s2,k,min_fingerprint_sep,continuity_bound,is_metric"));
    assert_eq!(lines.count(), 62);
}

#[test]
fn coincident_anchors_are_a_config_error() {
    let mut cfg = ok_json(&["gen", "config"]);
    cfg["anchor_points"][1] = cfg["anchor_points"][0].clone();
    let path = write(&scratch("coincident.json"), &cfg.to_string());
    let out = ghspace(&["sweep", &path, "--grid", "8"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("coincide"));
}
