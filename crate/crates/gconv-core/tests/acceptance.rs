//! Acceptance suite: each criterion runs at its pinned tolerance and
//! prints one pass/fail line. The same library code backs
//! `gconv verify --suite all`.

use gconv_core::report::Report;
use gconv_core::verify::{run_suite, VerifyConfig};

fn run_criterion(number: u32, title: &str, suite: &str, budget_seconds: Option<f64>) -> Report {
    let cfg = VerifyConfig::default();
    let t0 = std::time::Instant::now();
    let report = run_suite(suite, &cfg).expect("suite runs to completion");
    let elapsed = t0.elapsed().as_secs_f64();
    let worst = report
        .checks
        .iter()
        .map(|c| c.residual)
        .fold(0.0f64, f64::max);
    let status = if report.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:2} ({title}): {status} [{} checks, worst residual {worst:.3e}, {elapsed:.2}s]"
    , report.checks.len());
    let failures: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {:.3e} > {:.3e}", c.name, c.residual, c.threshold))
        .collect();
    assert!(report.pass, "failing checks:\n{}", failures.join("\n"));
    if let Some(budget) = budget_seconds {
        assert!(
            elapsed < budget,
            "criterion {number} took {elapsed:.2}s, budget {budget}s"
        );
    }
    report
}

#[test]
fn criterion_01_irrep_integrity() {
    run_criterion(1, "irrep integrity", "irreps", Some(5.0));
}

#[test]
fn criterion_02_fourier_round_trip_and_plancherel() {
    run_criterion(2, "Fourier round trip + Plancherel", "fourier", None);
}

#[test]
fn criterion_03_convolution_theorem() {
    run_criterion(3, "convolution theorem", "convolution", None);
}

#[test]
fn criterion_04_sparsity_masks() {
    run_criterion(4, "quotient-space Fourier sparsity", "sparsity", None);
}

#[test]
fn criterion_05_forward_equivariance() {
    run_criterion(5, "network equivariance (forward)", "forward", None);
}

#[test]
fn criterion_06_reverse_equivariance() {
    run_criterion(
        6,
        "equivariant maps are convolutions (reverse)",
        "reverse",
        None,
    );
}

#[test]
fn criterion_07_group_sum_and_lifting_lemmas() {
    run_criterion(7, "group-sum and lifting lemmas", "lemmas", None);
}

#[test]
fn criterion_08_subset_chain_support() {
    run_criterion(8, "subset-chain single-column support", "mpnn", None);
}

#[test]
fn criterion_09_representative_independence() {
    run_criterion(
        9,
        "coset-representative independence",
        "representatives",
        None,
    );
}

#[test]
fn criterion_10_full_suite_wall_time() {
    let cfg = VerifyConfig::default();
    let t0 = std::time::Instant::now();
    let report = run_suite("all", &cfg).expect("suite runs to completion");
    let elapsed = t0.elapsed().as_secs_f64();
    println!(
        "criterion 10 (full suite wall time): {} [{} checks in {elapsed:.2}s, budget 120s]",
        if report.pass && elapsed < 120.0 {
            "PASS"
        } else {
            "FAIL"
        },
        report.checks.len()
    );
    assert!(report.pass);
    assert!(elapsed < 120.0, "suite took {elapsed:.2}s");
}
