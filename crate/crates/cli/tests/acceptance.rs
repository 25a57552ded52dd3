//! Acceptance suite: every verification check as its own test, one
//! pass/fail line each. `cargo test -p infmax-cli --test acceptance`.

use infmax_cli::verify::{run_checks, DEFAULT_SEED};

fn run(name: &str) {
    let outcomes = run_checks(DEFAULT_SEED, Some(name));
    assert_eq!(outcomes.len(), 1, "check {name} not found");
    let outcome = &outcomes[0];
    println!("{}", outcome.render());
    assert!(outcome.passed, "{}", outcome.render());
}

#[test]
fn criterion_1_rr_unbiasedness() {
    run("rr-unbiasedness");
}

#[test]
fn criterion_2_maxcover_sandwich() {
    run("maxcover-sandwich");
}

#[test]
fn criterion_3_epic_expected_approximation() {
    run("epic-expected-approximation");
}

#[test]
fn criterion_4_lower_bound_properties() {
    run("lower-bound-properties");
}

#[test]
fn criterion_5_feedback_consistency() {
    run("feedback-consistency");
}

#[test]
fn criterion_6_adaptivity_gain() {
    run("adaptivity-gain");
}

#[test]
fn criterion_7_calibration_formulas() {
    run("calibration-formulas");
}

#[test]
fn criterion_8_rho_exactness() {
    run("rho-exactness");
}

#[test]
fn criterion_9_run_determinism() {
    run("run-determinism");
}
