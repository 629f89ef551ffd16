//! End-to-end checks of the gconv binary: output shape, exit codes, and
//! byte-identical JSON for fixed seeds and flags.

use std::process::Command;

fn gconv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gconv"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn group_info_reports_order_and_labels() {
    let out = gconv(&["group", "info", "Z4", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["order"], 4);
    assert_eq!(v["config"]["labels"][3], "3");
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_suite_exits_zero_on_pass() {
    let out = gconv(&["verify", "--suite", "lemmas"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn verify_json_is_byte_identical_for_fixed_seed() {
    let a = gconv(&["verify", "--suite", "sparsity", "--seed", "3", "--json"]);
    let b = gconv(&["verify", "--suite", "sparsity", "--seed", "3", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    let out = gconv(&["demo", "mpnn", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gconv(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gconv(&["group", "info", "Q8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_with_tol_cap_still_passes() {
    let out = gconv(&["verify", "--suite", "convolution", "--tol", "1e-9"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn convolve_case3_checks_out_against_fourier() {
    let dir = std::env::temp_dir().join("gconv-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let f_path = dir.join("f.json");
    let g_path = dir.join("chi.json");
    std::fs::write(
        &f_path,
        r#"{"space":{"group":"S3","quotient":{"kind":"LEFT","H":["(12)"]}},
           "shape":[1,1],
           "values":[[[[0.5,0.0]]],[[[1.0,-1.0]]],[[[0.25,2.0]]]]}"#,
    )
    .unwrap();
    std::fs::write(
        &g_path,
        r#"{"space":{"group":"S3","quotient":{"kind":"DOUBLE","H":["(12)"],"K":["(12)"]}},
           "shape":[1,1],
           "values":[[[[1.0,0.5]]],[[[-0.5,0.25]]]]}"#,
    )
    .unwrap();
    let out = gconv(&[
        "convolve",
        "--case",
        "3",
        "--group",
        "S3",
        "--h",
        "(12)",
        "--k",
        "(12)",
        "--f",
        f_path.to_str().unwrap(),
        "--g",
        g_path.to_str().unwrap(),
        "--via-fourier",
        "--json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["pass"], true);
    // result lives on S3/S2: three points
    assert_eq!(v["result"]["values"].as_array().unwrap().len(), 3);
    // a wrong --h is rejected as a usage error
    let out = gconv(&[
        "convolve",
        "--case",
        "3",
        "--group",
        "S3",
        "--h",
        "(13)",
        "--f",
        f_path.to_str().unwrap(),
        "--g",
        g_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mpnn_demo_json_carries_support_labels() {
    let out = gconv(&[
        "demo", "mpnn", "--n", "4", "--layers", "2", "--seed", "7", "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["layer_reports"][0]["points"], 6);
    assert_eq!(v["result"]["layer_reports"][0]["support"][1][0], "(3,1)");
    assert_eq!(v["report"]["pass"], true);
}
