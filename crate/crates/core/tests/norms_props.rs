use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

use focklab::entire::EntireFunction;
use focklab::norms::{norm, norm_finite_p_with, Exponent, NormOptions};
use focklab::numeric::ln_add;
use focklab::weights::Weight;

fn weight() -> impl Strategy<Value = Weight> {
    prop::sample::select(vec!["power:3", "power:4", "exp:1", "gaussian"]).prop_map(|s| s.parse().unwrap())
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop::sample::select(vec![
        Exponent::Finite(1.0),
        Exponent::Finite(2.0),
        Exponent::Finite(3.5),
        Exponent::Infinite,
    ])
}

fn poly() -> impl Strategy<Value = EntireFunction> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=6)
        .prop_map(|c| EntireFunction::new(c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
        .prop_filter("non-zero", |f| !f.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_is_homogeneous(f in poly(), w in weight(), p in exponent(), re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-3);
        let a = norm(&f, &w, p).unwrap().log_value;
        let b = norm(&f.scale(c), &w, p).unwrap().log_value;
        prop_assert!((b - a - c.norm().ln()).abs() <= 1e-10 * (1.0 + a.abs()), "{} {} {}", a, b, c);
    }

    #[test]
    fn raising_the_cap_only_adds_tail_mass(f in poly(), w in weight(), p in prop::sample::select(vec![1.0, 2.0, 3.5])) {
        let mut prev: Option<(f64, f64)> = None;
        for cap in [8.0, 12.0, 25.0, 50.0] {
            let r = norm_finite_p_with(&f, &w, p, &NormOptions { radius_cap: cap }).unwrap();
            let mass = p * r.log_value;
            if let Some((m, tail)) = prev {
                // mass(cap') >= mass(cap) - tail(cap), in the log domain
                prop_assert!(ln_add(mass, tail) >= m - 1e-12 * (1.0 + m.abs()), "cap {}: {} {} {}", cap, mass, tail, m);
            }
            prev = Some((mass, r.tail_log_bound));
        }
    }
}

/// `int |z|^{np} e^{-p r^4} dm = (pi/2) p^{-(np+2)/4} Gamma((np+2)/4)`.
#[test]
fn monomials_match_gamma_closed_form() {
    let w = Weight::power(4.0).unwrap();
    for p in [1.0, 2.0, 3.0, 0.5] {
        for n in [0usize, 1, 4, 9, 20] {
            let a = n as f64 * p + 2.0;
            let want = std::f64::consts::FRAC_PI_2.ln() - a / 4.0 * p.ln() + ln_gamma(a / 4.0);
            let got = p * norm(&EntireFunction::monomial(n), &w, Exponent::Finite(p)).unwrap().log_value;
            assert!((got - want).exp_m1().abs() < 1e-10, "p={p} n={n}: {got} {want}");
        }
    }
}
