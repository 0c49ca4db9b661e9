use num_complex::Complex64;
use proptest::prelude::*;

use focklab::entire::EntireFunction;
use focklab::operators::{multiply, parts_identity_residual, volterra};

fn series(max_degree: usize, bound: f64) -> impl Strategy<Value = EntireFunction> {
    prop::collection::vec((-bound..bound, -bound..bound), 1..=max_degree + 1)
        .prop_map(|c| EntireFunction::new(c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

fn scalar() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn max_coeff(fs: &[&EntireFunction]) -> f64 {
    fs.iter()
        .flat_map(|f| f.coeffs().iter().map(|c| c.norm()))
        .fold(0.0, f64::max)
}

fn max_diff(a: &EntireFunction, b: &EntireFunction) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n).map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parts_identity(g in series(64, 10.0), f in series(64, 10.0)) {
        let scale = max_coeff(&[&multiply(&g, &f), &volterra(&g, &f)]).max(f64::MIN_POSITIVE);
        prop_assert!(parts_identity_residual(&g, &f) <= 1e-12 * scale);
    }

    #[test]
    fn volterra_is_linear(
        g in series(20, 10.0),
        f in series(20, 10.0),
        h in series(20, 10.0),
        a in scalar(),
        b in scalar(),
    ) {
        let lhs = volterra(&g, &f.linear_combination(a, &h, b));
        let rhs = volterra(&g, &f).linear_combination(a, &volterra(&g, &h), b);
        let scale = max_coeff(&[&lhs, &rhs]).max(1.0);
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * scale);
    }

    #[test]
    fn volterra_differentiates_to_product(g in series(40, 10.0), f in series(40, 10.0)) {
        let lhs = volterra(&g, &f).derivative();
        let rhs = multiply(&g.derivative(), &f);
        let scale = max_coeff(&[&rhs]).max(1.0);
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * scale);
    }
}
