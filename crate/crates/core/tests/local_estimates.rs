use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use focklab::entire::EntireFunction;
use focklab::local_estimates::{
    ln_disk_integral, local_equivalence_check, subharmonic_mean_ratio, subharmonic_survey, tau_comparability,
    LocalParams, CONSTANT_RATIO,
};
use focklab::weights::Weight;

const BUILTINS: [&str; 5] = ["power:3", "power:4", "exp:1", "superexp:1", "gaussian"];

/// Recorded from the deterministic run.
const Z8_GAUSSIAN_AT_3: f64 = 0.31878151799350724;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `int_{D(c, rho)} |z|^2 dm = pi rho^2 (|c|^2 + rho^2 / 2)`.
    #[test]
    fn disk_integral_of_modulus_squared(re in -20.0..20.0f64, im in -20.0..20.0f64, rho in 1e-3..5.0f64) {
        let c = Complex64::new(re, im);
        let want = (PI * rho * rho * (c.norm_sqr() + 0.5 * rho * rho)).ln();
        let got = ln_disk_integral(c, rho, &|u| u.norm_sqr().ln()).unwrap();
        prop_assert!((got - want).abs() < 1e-9, "{} {}", got, want);
    }

    /// With `beta = 0` a constant has ratio exactly `1/pi`.
    #[test]
    fn constant_without_weight_gives_reciprocal_pi(re in -10.0..10.0f64, im in -10.0..10.0f64, p in 0.5..4.0f64) {
        let w = Weight::power(4.0).unwrap();
        let params = LocalParams::new(0.2, 0.0).unwrap();
        let got = subharmonic_mean_ratio(&EntireFunction::monomial(0), &w, p, &params, Complex64::new(re, im)).unwrap();
        prop_assert!((got - CONSTANT_RATIO).abs() < 1e-12, "{}", got);
    }
}

#[test]
fn zero_of_f_gives_zero_ratio() {
    let w = Weight::gaussian();
    let r = subharmonic_mean_ratio(&EntireFunction::monomial(1), &w, 2.0, &LocalParams::default(), Complex64::new(0.0, 0.0));
    assert_eq!(r.unwrap(), 0.0);
}

#[test]
fn z8_gaussian_matches_baseline() {
    let params = LocalParams::new(0.1, 2.0).unwrap();
    let got = subharmonic_mean_ratio(&EntireFunction::monomial(8), &Weight::gaussian(), 2.0, &params, Complex64::new(3.0, 0.0))
        .unwrap();
    assert!((got - Z8_GAUSSIAN_AT_3).abs() < 1e-10, "{got}");
}

#[test]
fn survey_is_reproducible() {
    let w = Weight::power(4.0).unwrap();
    let params = LocalParams::new(0.1, 2.0).unwrap();
    let a = subharmonic_survey(&w, 2.0, &params, 40).unwrap();
    let b = subharmonic_survey(&w, 2.0, &params, 40).unwrap();
    assert_eq!(a, b);
    assert!(a.ratios.iter().all(|r| r.is_finite() && *r >= 0.0));
    assert!(a.points.iter().all(|z| z.norm() <= a.radius));
}

#[test]
fn tau_is_comparable_on_small_disks() {
    for spec in BUILTINS {
        let w: Weight = spec.parse().unwrap();
        let c = tau_comparability(&w, 0.1, 64).unwrap();
        assert!(c.min_ratio >= 0.5 && c.max_ratio <= 2.0, "{spec}: {c:?}");
    }
}

#[test]
fn equivalence_rejects_bad_parameters() {
    let w = Weight::power(4.0).unwrap();
    assert!(local_equivalence_check(2, &w, 0.0, 2.0, 0.1).is_err());
    assert!(local_equivalence_check(2, &w, 2.0, f64::INFINITY, 0.1).is_err());
    assert!(local_equivalence_check(2, &w, 2.0, 2.0, 0.6).is_err());
}
