//! Acceptance suite: one test per headline claim, each printing a single
//! pass/fail line. Every test draws its checks from `verify::run_suite("all")`
//! so the CLI `verify` command and this suite can never disagree.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::sync::OnceLock;

use kicksim::verify::{run_suite, Check, VerifyOptions};

fn all_checks() -> &'static Vec<Check> {
    static CHECKS: OnceLock<Vec<Check>> = OnceLock::new();
    CHECKS.get_or_init(|| {
        run_suite("all", &VerifyOptions::default())
            .expect("verification suites run")
            .into_iter()
            .flat_map(|v| v.checks)
            .collect()
    })
}

/// Selects every check whose name starts with one of `prefixes`, prints the
/// criterion's pass/fail line, and fails the test if any check failed.
fn criterion(label: &str, prefixes: &[&str]) {
    let selected: Vec<&Check> = all_checks()
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.name.starts_with(p)))
        .collect();
    assert!(
        !selected.is_empty(),
        "no checks matched {prefixes:?}; prefix list is stale"
    );
    let failed: Vec<&&Check> = selected.iter().filter(|c| !c.pass).collect();
    let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
    println!("acceptance: {label}: {verdict} ({} checks)", selected.len());
    for c in &failed {
        println!(
            "    failed check {}: value {:e} vs threshold {:e}",
            c.name, c.value, c.threshold
        );
    }
    assert!(
        failed.is_empty(),
        "{label}: {} of {} checks failed",
        failed.len(),
        selected.len()
    );
}

#[test]
fn criterion_01_washout_and_recovery_without_detector() {
    criterion(
        "01 unconditioned washout, full visibility without detector",
        &["washout_", "no_detector_"],
    );
}

#[test]
fn criterion_02_partial_which_way_visibility() {
    criterion(
        "02 visibility equals detector overlap",
        &["partial_overlap_"],
    );
}

#[test]
fn criterion_03_eraser_recovery() {
    criterion(
        "03 eraser recovers and shifts the pattern",
        &["eraser_plus_", "eraser_minus_"],
    );
}

#[test]
fn criterion_04_kick_equivalence() {
    criterion(
        "04 entanglement and kick descriptions agree",
        &["kick_equivalence_", "kick_infidelity_sweep_"],
    );
}

#[test]
fn criterion_05_kick_spectrum_exact() {
    criterion("05 kick ladder is exactly rational", &["spectrum_"]);
}

#[test]
fn criterion_06_fringe_shift_law() {
    criterion(
        "06 conditioned fringes shift by j/n and sum to no fringes",
        &["fringe_shift_law_", "shifted_sum_"],
    );
}

#[test]
fn criterion_07_general_unbiased_basis() {
    criterion(
        "07 general unbiased basis yields kicks, biased bases do not",
        &["general_basis_", "biased_basis_"],
    );
}

#[test]
fn criterion_08_momentum_space_dual() {
    criterion(
        "08 momentum peaks dual: position kicks",
        &["position_kick_", "duality_"],
    );
}

#[test]
fn criterion_09_monte_carlo_statistics() {
    criterion(
        "09 Monte Carlo frequencies, KS agreement, determinism",
        &["outcome_frequency_", "cross_basis_", "equal_seed_"],
    );
}

#[test]
fn criterion_10_numerical_hygiene() {
    criterion(
        "10 norm conservation, basis round trip, eraser decomposition",
        &["evolution_norm_", "basis_round_trip_", "eraser_decomposition_"],
    );
}
