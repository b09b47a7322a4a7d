//! One test per acceptance criterion. Each writes its PASS/FAIL line and
//! per-check details straight to stdout, so the lines appear even when the
//! harness captures output.

use std::io::Write;
use std::sync::LazyLock;

use sigma_damp_acceptance::Suite;

static SUITE: LazyLock<Suite> = LazyLock::new(Suite::default);

fn criterion(id: u8) {
    let report = SUITE.run(id);
    let mut out = std::io::stdout().lock();
    let _ = write!(out, "\n{report}");
    let _ = out.flush();
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_01_rates_positive_sigma1() {
    criterion(1);
}

#[test]
fn criterion_02_rates_zero_sigma1() {
    criterion(2);
}

#[test]
fn criterion_03_s_weight_shift() {
    criterion(3);
}

#[test]
fn criterion_04_lower_bound_band() {
    criterion(4);
}

#[test]
fn criterion_05_golden_profiles() {
    criterion(5);
}

#[test]
fn criterion_06_oracle_equivalence() {
    criterion(6);
}

#[test]
fn criterion_07_low_frequency_scaling() {
    criterion(7);
}

#[test]
fn criterion_08_high_frequency_decay() {
    criterion(8);
}

#[test]
fn criterion_09_ode_residual() {
    criterion(9);
}

#[test]
fn criterion_10_order_improvement() {
    criterion(10);
}
