//! One test per acceptance criterion. Each prints a single PASS/FAIL line.
//!
//! Checks run one at a time so their time budgets are not skewed by other
//! tests competing for cores.

use std::sync::Mutex;

use fairdiv::acceptance::{self, Check};

static SERIAL: Mutex<()> = Mutex::new(());

fn check(f: Check) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let result = f();
    println!("{result}");
    assert!(result.passed, "{result}");
}

#[test]
fn c01_matching_oracle_equivalence() {
    check(acceptance::criterion_01);
}

#[test]
fn c02_random_graph_matching_threshold() {
    check(acceptance::criterion_02);
}

#[test]
fn c03_argmax_envy_freeness_rate() {
    check(acceptance::criterion_03);
}

#[test]
fn c04_sampling_welfare_ratio() {
    check(acceptance::criterion_04);
}

#[test]
fn c05_full_sample_equals_argmax() {
    check(acceptance::criterion_05);
}

#[test]
fn c06_discrete_exact_welfare() {
    check(acceptance::criterion_06);
}

#[test]
fn c07_two_stage_proportional() {
    check(acceptance::criterion_07);
}

#[test]
fn c08_ef_small_goods() {
    check(acceptance::criterion_08);
}

#[test]
fn c09_ef_small_chores() {
    check(acceptance::criterion_09);
}

#[test]
fn c10_prop_linear() {
    check(acceptance::criterion_10);
}

#[test]
fn c11_exhaustive_oracle_consistency() {
    check(acceptance::criterion_11);
}

#[test]
fn c12_deterministic_plot_data() {
    check(acceptance::criterion_12);
}
