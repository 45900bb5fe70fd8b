//! One test per acceptance criterion; each prints its PASS/FAIL line.
//! Run with `cargo test -p fqcharpoly --test acceptance -- --nocapture` to see the details.

use fqcharpoly::verify::{run_check, VerifyOptions};

fn check(id: u32) {
    let outcome = run_check(id, &VerifyOptions::default()).expect("known check");
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_01_oracle_equivalence() {
    check(1);
}

#[test]
fn criterion_02_normalization() {
    check(2);
}

#[test]
fn criterion_03_explicit_bounds() {
    check(3);
}

#[test]
fn criterion_04_gl_lower_bound() {
    check(4);
}

#[test]
fn criterion_05_generating_functions() {
    check(5);
}

#[test]
fn criterion_06_unipotent_counts() {
    check(6);
}

#[test]
fn criterion_07_derangement_masses() {
    check(7);
}

#[test]
fn criterion_08_sampler_soundness() {
    check(8);
}

#[test]
fn criterion_09_invariant_subspace_inequality() {
    check(9);
}

#[test]
fn criterion_10_invariable_trend() {
    check(10);
}
