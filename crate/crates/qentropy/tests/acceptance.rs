//! Acceptance suite: runs every criterion of the verification battery and
//! prints one pass/fail line per criterion.  Each criterion also runs as its
//! own test so a failure is attributable.

use qentropy::verify;

const SEED: u64 = 20260809;

fn run(report: verify::CriterionReport) {
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_critical_couplings() {
    run(verify::criterion_critical_couplings());
}

#[test]
fn criterion_02_calibration() {
    run(verify::criterion_calibration());
}

#[test]
fn criterion_03_rod_census() {
    run(verify::criterion_rod_census());
}

#[test]
fn criterion_04_axisymmetry() {
    run(verify::criterion_axisymmetry(SEED));
}

#[test]
fn criterion_05_shared_eigenframe() {
    run(verify::criterion_shared_eigenframe(SEED));
}

#[test]
fn criterion_06_counterexample() {
    run(verify::criterion_counterexample());
}

#[test]
fn criterion_07_oracle_equivalence() {
    run(verify::criterion_oracle(SEED));
}

#[test]
fn criterion_08_property_battery() {
    run(verify::criterion_property_battery(SEED));
}

#[test]
fn criterion_09_to_phase_diagram() {
    run(verify::criterion_to_phase_diagram(SEED));
}

#[test]
fn criterion_10_bentcore_reduction() {
    run(verify::criterion_bentcore_reduction(SEED));
}
