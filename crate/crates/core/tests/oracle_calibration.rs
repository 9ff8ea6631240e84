//! Fast path against the brute-force double integral.

use btz_tripartite::correlators::oracle::{compare_with_fast_path, oracle_element, OracleSettings, OracleTarget};
use btz_tripartite::quadrature::BRANCH_SIGN;
use btz_tripartite::*;
use std::f64::consts::PI;

fn pair(mass: f64, d1: f64, d2: f64, dphi: f64) -> DetectorConfiguration {
    let bg = BtzBackground::dirichlet(10.0, mass).unwrap();
    let a = StaticDetector::at_horizon_distance(&bg, d1, 0.0, 1.0).unwrap();
    let b = StaticDetector::at_horizon_distance(&bg, d2, dphi, 1.0).unwrap();
    DetectorConfiguration::new(bg, vec![a, b]).unwrap()
}

#[test]
fn calibration_point_agrees() {
    let cfg = pair(1.0, 1.0, 2.0, 0.0);
    let fast = CorrelatorSet::compute(&cfg, &Numerics::default()).unwrap();
    let rows = compare_with_fast_path(&cfg, &fast, &OracleSettings::default()).unwrap();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert!(row.within_tolerance(), "{}: fast {} oracle {}", row.target, row.fast, row.oracle.value);
        // Much tighter than required; guards against silent drift.
        assert!(row.rel_diff < 1e-5, "{}: {}", row.target, row.rel_diff);
        // Real elements come out real from the oracle as well.
        if !matches!(row.target, OracleTarget::X(_)) {
            assert!(row.oracle.value.im.abs() < 1e-10, "{}", row.oracle.value);
        }
        assert!(row.oracle.error < 2e-3 * row.oracle.value.norm());
    }
}

#[test]
fn opposite_branch_is_rejected() {
    let cfg = pair(1.0, 1.0, 2.0, 0.0);
    let wrong = CorrelatorSet::compute_with_branch(&cfg, &Numerics::default(), -BRANCH_SIGN).unwrap();
    let rows = compare_with_fast_path(&cfg, &wrong, &OracleSettings::default()).unwrap();
    assert!(rows.iter().any(|r| !r.within_tolerance()));
}

#[test]
fn equilateral_pair_agrees() {
    let cfg = pair(0.01, 2.0, 2.0, 2.0 * PI / 3.0);
    let fast = CorrelatorSet::compute(&cfg, &Numerics::default()).unwrap();
    for row in compare_with_fast_path(&cfg, &fast, &OracleSettings::default()).unwrap() {
        assert!(row.within_tolerance(), "{}: fast {} oracle {}", row.target, row.fast, row.oracle.value);
    }
}

#[test]
fn frozen_oracle_values() {
    let cfg = pair(1.0, 1.0, 2.0, 0.0);
    let s = OracleSettings::default();
    let expect = [
        (OracleTarget::P(DetectorLabel::A), 7.4945274614e-2, 0.0),
        (OracleTarget::P(DetectorLabel::B), 6.4265121975e-2, 0.0),
        (OracleTarget::C(PairLabel::AB), 5.8551277593e-2, 0.0),
        (OracleTarget::X(PairLabel::AB), -1.3068373240e-1, 9.7452528754e-2),
    ];
    for (target, re, im) in expect {
        let v = oracle_element(&cfg, target, &s).unwrap().value;
        let want = num_complex::Complex64::new(re, im);
        assert!((v - want).norm() < 1e-9 * want.norm(), "{target}: {v}");
    }
}
