//! `V_g`, `I_g`, `M_g` and `D` on truncated power series.
//!
//! Products are carried to full degree `deg f + deg g`; nothing is truncated
//! silently.

use num_complex::Complex64;

use crate::entire::EntireFunction;

fn cauchy_product(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `M_g f = g f`
pub fn multiply(g: &EntireFunction, f: &EntireFunction) -> EntireFunction {
    EntireFunction::new(cauchy_product(g.coeffs(), f.coeffs()))
}

/// `D f = f'`
pub fn differentiate_op(f: &EntireFunction) -> EntireFunction {
    f.derivative()
}

/// `V_g f(z) = int_0^z f(w) g'(w) dw`
pub fn volterra(g: &EntireFunction, f: &EntireFunction) -> EntireFunction {
    multiply(f, &g.derivative()).antiderivative()
}

/// `I_g f(z) = int_0^z f'(w) g(w) dw`
pub fn companion(g: &EntireFunction, f: &EntireFunction) -> EntireFunction {
    multiply(&f.derivative(), g).antiderivative()
}

/// Largest coefficient modulus of `V_g f + I_g f - M_g f + f(0) g(0)`.
pub fn parts_identity_residual(g: &EntireFunction, f: &EntireFunction) -> f64 {
    let v = volterra(g, f);
    let i = companion(g, f);
    let m = multiply(g, f);
    let n = v.coeffs().len().max(i.coeffs().len()).max(m.coeffs().len());
    let f0g0 = f.coeff(0) * g.coeff(0);
    (0..n)
        .map(|k| {
            let mut r = v.coeff(k) + i.coeff(k) - m.coeff(k);
            if k == 0 {
                r += f0g0;
            }
            r.norm()
        })
        .fold(0.0, f64::max)
}
