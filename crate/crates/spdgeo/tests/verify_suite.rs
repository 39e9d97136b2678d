//! Suite-level behavior of the verification catalog: the full dimension-2
//! run passes, repeated runs agree field by field, and failing reports carry
//! a reproducing witness.

use spdgeo::verify::{run_check, CheckSpec, CATALOG};

#[test]
fn full_catalog_passes_at_dimension_two() {
    let reports = spdgeo::run_all(7, 2).unwrap();
    assert_eq!(reports.len(), 17);
    for r in &reports {
        assert!(r.pass, "{} failed with margin {:e}", r.name, r.worst_margin);
    }
    // Same seed, same dimension: identical outcomes (elapsed aside).
    let again = spdgeo::run_all(7, 2).unwrap();
    for (r1, r2) in reports.iter().zip(&again) {
        assert_eq!(r1.name, r2.name);
        assert_eq!(r1.pass, r2.pass);
        assert_eq!(r1.worst_margin, r2.worst_margin, "{}", r1.name);
        assert_eq!(r1.witness, r2.witness, "{}", r1.name);
    }
}

#[test]
fn catalog_names_are_runnable_individually() {
    for name in CATALOG {
        let spec = CheckSpec::new(*name, 11).with_dimension(2).with_samples(3);
        let report = run_check(&spec).unwrap();
        assert_eq!(&report.name, name);
    }
}

#[test]
fn failing_report_carries_witness() {
    let spec = CheckSpec::new("thm3_3_alpha", 7)
        .with_dimension(2)
        .with_samples(3)
        .with_tolerance("rel_err", 1e-30);
    let report = run_check(&spec).unwrap();
    assert!(!report.pass);
    let worst = &report.witness["worst"];
    assert!(!worst.is_null(), "failing check must identify its worst case");
    assert!(!worst["a"].is_null(), "witness must carry the inputs");
}
