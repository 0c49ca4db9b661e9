use proptest::prelude::*;

use focklab::weights::{check_admissibility, Weight};

const ADMISSIBLE: [&str; 4] = ["power:3", "power:4", "exp:1", "superexp:1"];

#[test]
fn laplacian_positive_and_tau_decreasing_on_1_to_30() {
    for spec in ADMISSIBLE {
        let w: Weight = spec.parse().unwrap();
        let radii: Vec<f64> = (0..=290).map(|i| 1.0 + 0.1 * i as f64).collect();
        let ln_tau: Vec<f64> = radii.iter().map(|r| w.ln_tau(*r).unwrap()).collect();
        for r in &radii {
            let l = w.ln_laplacian(*r);
            assert!(l.sign > 0 && l.ln.is_finite(), "{spec} at {r}");
        }
        assert!(ln_tau.windows(2).all(|p| p[1] < p[0]), "{spec}");
    }
}

#[test]
fn large_derivative_radius_is_small() {
    for spec in ADMISSIBLE {
        let rep = check_admissibility(&spec.parse().unwrap(), 1000.0, 400);
        let r0 = rep.large_psi_prime_radius.expect(spec);
        assert!(r0 <= 10.0, "{spec}: {r0}");
    }
}

#[test]
fn audit_stops_where_log_domain_overflows() {
    let rep = check_admissibility(&"superexp:1".parse().unwrap(), 1000.0, 400);
    assert!(rep.audited_radius < 710.0 && rep.audited_radius > 600.0, "{}", rep.audited_radius);
    assert!(rep.verdict);
    let full = check_admissibility(&Weight::power(4.0).unwrap(), 1000.0, 400);
    assert!((full.audited_radius - 1000.0).abs() < 1e-9);
}

fn weight() -> impl Strategy<Value = Weight> {
    prop::sample::select(vec![
        "power:3",
        "power:4.5",
        "exp:1",
        "exp:0.5",
        "superexp:0.5",
        "gaussian",
        "expr:r^3 + r^2",
        "expr:exp(r) * r^2",
        "expr:r^(7/2)",
    ])
    .prop_map(|s| s.parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn second_derivative_matches_finite_difference(w in weight(), r in 0.5..5.0f64) {
        let h = 1e-5;
        let fd = (w.psi_prime(r + h) - w.psi_prime(r - h)) / (2.0 * h);
        let exact = w.psi_second(r);
        prop_assert!(((exact - fd) / exact).abs() < 1e-6, "{}: {} vs {}", w, exact, fd);
        let lap = exact + w.psi_prime(r) / r;
        prop_assert!(((w.laplacian(r) - lap) / lap).abs() < 1e-12);
    }
}
