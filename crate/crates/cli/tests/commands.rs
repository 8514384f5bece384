use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bubbles"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn all_pass(r: &Value) -> bool {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["status"] == "PASS")
}

#[test]
fn expect_edge_tree_scaled() {
    let b = data("edge_tree_k1_l1.json");
    let r = report(&[
        "expect",
        b.to_str().unwrap(),
        "--alpha",
        "2",
        "--numeric-N",
        "3",
    ]);
    assert_eq!(r["outputs"]["scaled_display"], "N^3 + N^1");
    assert_eq!(r["outputs"]["numeric_value"], "2430");
    assert!(all_pass(&r));
}

#[test]
fn expect_dipole() {
    let r = report(&["expect", data("dipole.json").to_str().unwrap()]);
    assert_eq!(r["outputs"]["scaled_display"], "N^4");
}

#[test]
fn expect_refuses_large_bubble_with_cost() {
    let out = run(&["expect", data("necklace_k12.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("exceeds") && err.contains("operations"),
        "{err}"
    );
}

#[test]
fn effective_edge_tree() {
    let r = report(&[
        "effective",
        data("edge_tree_k1_l1.json").to_str().unwrap(),
        "--split",
        "2,4",
    ]);
    assert_eq!(
        r["outputs"]["expansion_display"],
        "(N^1/(N^2 + 1))*p_2 + (N^1/(N^2 + 1))*p_1*p_1"
    );
    assert!(all_pass(&r));
    assert!(!r["checks"].as_array().unwrap().is_empty());
}

#[test]
fn effective_necklace() {
    let r = report(&["effective", data("necklace_k3.json").to_str().unwrap()]);
    assert_eq!(r["outputs"]["expansion_display"], "p_3");
    assert!(all_pass(&r));
}

#[test]
fn effective_names_violated_condition() {
    let out = run(&[
        "effective",
        data("not_chain_expressible.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("not chain-expressible") && err.contains("column colors"),
        "{err}"
    );
}

#[test]
fn tree_file_and_list() {
    let r = report(&["tree", data("tree_2_1.json").to_str().unwrap()]);
    let row = &r["outputs"]["trees"][0];
    assert_eq!(row["catalan_product"], "2");
    assert_eq!(row["oracle_leading"]["coeff"], "2");
    assert!(all_pass(&r));

    let r = report(&["tree", data("trees.json").to_str().unwrap()]);
    assert_eq!(r["outputs"]["count"], 2);
    assert_eq!(r["outputs"]["trees"][0]["catalan_product"], "2");
}

#[test]
fn tree_enumeration_csv() {
    let out = run(&["tree", "--enumerate", "2", "3", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.ends_with(",PASS")));
}

#[test]
fn tree_rejects_bad_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"color":2,"labels":[1]}"#).unwrap();
    let out = run(&["tree", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weingarten_two() {
    let r = report(&["weingarten", "2", "--dim", "N^2"]);
    let d = &r["outputs"]["display"];
    assert_eq!(d[0]["value"], "-1/(N^6 - N^2)");
    assert_eq!(d[1]["value"], "1/(N^4 - 1)");
    assert!(all_pass(&r));

    let r = report(&["weingarten", "3", "--dim", "5"]);
    assert_eq!(r["outputs"]["table"]["values"][2]["value"], "23/2520");
    assert!(all_pass(&r));
}

#[test]
fn weingarten_rejects_small_dim() {
    assert_eq!(
        run(&["weingarten", "4", "--dim", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn wishart_square_and_numeric() {
    let r = report(&["wishart", "2", "--rows", "N", "--cols", "N"]);
    assert_eq!(r["outputs"]["moment_display"], "2*N^3");
    assert!(all_pass(&r));
    let r = report(&["wishart", "1,1", "--rows", "3", "--cols", "4"]);
    assert_eq!(r["outputs"]["moment"], "156");
}

#[test]
fn mc_deterministic_and_close() {
    let b = data("edge_tree_k1_l1.json");
    let args = [
        "mc",
        b.to_str().unwrap(),
        "--numeric-N",
        "2",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let a = report(&args);
    let mean = a["outputs"]["estimate"]["mean"].as_f64().unwrap();
    assert!((mean - 160.0).abs() < 5.0, "{mean}");
    assert!(all_pass(&a));

    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let many = run(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = run(&[
        "weingarten",
        "2",
        "--dim",
        "3",
        "--csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text, "class,value,asymptotic_exp,asymptotic_coeff\n\"(2)\",\"-1/24\",-3,-1\n\"(1,1)\",\"1/8\",-2,1\n");
}
