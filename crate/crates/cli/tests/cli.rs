use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn orbidt(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbidt"))
        .args(args)
        .env("ORBIDT_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn enumerate_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = orbidt(dir.path(), &["enumerate", "--r", "2", "--max-boxes", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 4);
    let sizes: Vec<u64> = v["records"].as_array().unwrap().iter().map(|r| r["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [1, 2, 2, 2]);
    // colors: one box of color 0, then (2,0) and twice (1,1)
    let alphas: Vec<Value> = v["records"].as_array().unwrap().iter().map(|r| r["alpha"].clone()).collect();
    assert_eq!(alphas, [serde_json::json!([1, 0]), serde_json::json!([2, 0]), serde_json::json!([1, 1]), serde_json::json!([1, 1])]);
}

#[test]
fn compare_closed_form_r2() {
    let dir = tempfile::tempdir().unwrap();
    let out = orbidt(dir.path(), &["compare", "--r", "2", "--max-boxes", "6", "--points", "3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["equal"], true);
    let cases = v["comparisons"].as_array().unwrap();
    assert_eq!(cases.len(), 3);
    for c in cases {
        assert!(c["coefficients"].as_array().unwrap().iter().all(|x| x["equal"] == true));
    }
}

#[test]
fn compare_limit_and_numerical_modes() {
    let dir = tempfile::tempdir().unwrap();
    for (lhs, rhs) in [("enumerated", "closedform"), ("transfer", "index"), ("enumerated", "transfer")] {
        let out = orbidt(
            dir.path(),
            &["compare", "--r", "3", "--max-boxes", "5", "--mode", "limit", "--lhs", lhs, "--rhs", rhs],
        );
        assert_eq!(out.status.code(), Some(0), "{lhs} vs {rhs}");
    }
    let out = orbidt(dir.path(), &["compare", "--r", "2", "--max-boxes", "6", "--mode", "numerical"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // the regular part alone misses the column contribution
    let out = orbidt(
        dir.path(),
        &["compare", "--r", "2", "--max-boxes", "3", "--points", "1", "--formula", "Fr"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["equal"], false);
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compare", "--r", "2", "--max-boxes", "4", "--points", "2", "--seed", "11"];
    let a = orbidt(dir.path(), &args);
    let b = orbidt(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
    let z1 = orbidt(dir.path(), &["zseries", "--r", "3", "--max-boxes", "4", "--seed", "5"]);
    let z2 = orbidt(dir.path(), &["zseries", "--r", "3", "--max-boxes", "4", "--seed", "5", "--jobs", "1"]);
    let z3 = orbidt(dir.path(), &["zseries", "--r", "3", "--max-boxes", "4", "--seed", "6"]);
    assert_eq!(z1.stdout, z2.stdout);
    assert_ne!(z1.stdout, z3.stdout);
}

#[test]
fn cache_hit_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["vertex", "--r", "2", "--max-boxes", "4", "--point", "2", "3/7", "5"];
    let cold = orbidt(dir.path(), &args);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let warm = orbidt(dir.path(), &args);
    assert_eq!(cold.stdout, warm.stdout);

    let mut uncached = args.to_vec();
    uncached.push("--no-cache");
    assert_eq!(orbidt(dir.path(), &uncached).stdout, cold.stdout);

    for f in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(f.unwrap().path(), "garbage\n").unwrap();
    }
    assert_eq!(orbidt(dir.path(), &args).stdout, cold.stdout);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["nosuchcommand"],
        vec!["enumerate", "--max-boxes", "x"],
        vec!["enumerate", "--r", "0"],
        vec!["closedform", "--formula", "G"],
        vec!["zseries", "--point", "1", "0", "2"],
        vec!["zseries", "--point", "1", "2"],
        vec!["compare", "--lhs", "transfer"],
        vec!["selfcheck", "--only", "A99"],
    ] {
        let out = orbidt(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn explicit_point_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let pt = ["--point", "2", "3", "1/5"];
    let z = json(&orbidt(dir.path(), &[&["zseries", "--r", "1", "--max-boxes", "4"][..], &pt].concat()));
    let f = json(&orbidt(dir.path(), &[&["closedform", "--r", "1", "--max-boxes", "4"][..], &pt].concat()));
    assert_eq!(z["coefficients"], f["coefficients"]);
    assert_eq!(z["point"], serde_json::json!(["2", "3", "1/5"]));
}

#[test]
fn csv_and_text_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = orbidt(dir.path(), &["closedform", "--r", "2", "--max-boxes", "2", "--formula", "Fnum", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,value");
    assert!(lines.contains(&"1-0,-1"));
    assert!(lines.contains(&"1-1,-2"));

    let out = orbidt(dir.path(), &["enumerate", "--r", "1", "--max-boxes", "1", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("size"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn transfer_reports_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = orbidt(dir.path(), &["transfer", "--r", "2", "--max-boxes", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert_eq!(v["ring"], "c-rational");
}

#[test]
fn selfcheck_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = orbidt(dir.path(), &["selfcheck", "--only", "A9", "--only", "A10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
}
