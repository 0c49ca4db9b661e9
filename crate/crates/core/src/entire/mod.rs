//! Entire functions as truncated power series.

mod hdr;

pub use hdr::Hdr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{ilogb, ldexp, ln_factorial};
use crate::weights::Weight;

/// Default truncation degree for user-supplied series.
pub const DEFAULT_DEGREE: usize = 64;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("series must contain at least one coefficient")]
    Empty,
    #[error("coefficient {0} is not finite")]
    NonFinite(usize),
}

/// Where a series came from; truncated exponentials carry an analytic tail
/// bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    User,
    Monomial(usize),
    /// `scale * sum_{k < terms} (lambda z)^k / k!`
    TruncatedExp {
        lambda: Complex64,
        terms: usize,
        scale: Complex64,
    },
}

/// Equality compares coefficients only.
#[derive(Debug, Clone)]
pub struct EntireFunction {
    coeffs: Vec<Complex64>,
    provenance: Provenance,
}

/// Value of a series at a point plus its floating-point error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub value: Hdr,
    /// `sum |c_k| |z|^k / |f(z)|`
    pub condition: f64,
    /// `2 N eps * condition`
    pub rel_error_bound: f64,
    /// Relative truncation bound for truncated-exponential provenance.
    pub tail_rel_bound: Option<f64>,
}

impl PartialEq for EntireFunction {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl EntireFunction {
    /// Builds a series from coefficients `c_0..c_N`, trimming trailing zeros.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self::with_provenance(coeffs, Provenance::User)
    }

    fn with_provenance(mut coeffs: Vec<Complex64>, provenance: Provenance) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        EntireFunction { coeffs, provenance }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `z^n`
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::with_provenance(c, Provenance::Monomial(n))
    }

    /// Partial sum `sum_{k < terms} (lambda z)^k / k!`.
    pub fn truncated_exp(lambda: Complex64, terms: usize) -> Self {
        assert!(terms >= 1);
        let mut c = Vec::with_capacity(terms);
        let mut cur = Complex64::new(1.0, 0.0);
        for k in 0..terms {
            if k > 0 {
                cur = cur * lambda / k as f64;
            }
            c.push(cur);
        }
        Self::with_provenance(
            c,
            Provenance::TruncatedExp {
                lambda,
                terms,
                scale: Complex64::new(1.0, 0.0),
            },
        )
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// The single nonzero coefficient, if the series is `c z^n`.
    pub fn as_monomial(&self) -> Option<(usize, Complex64)> {
        let mut found = None;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                if found.is_some() {
                    return None;
                }
                found = Some((k, *c));
            }
        }
        found
    }

    /// Multiplies by a constant; truncated-exponential provenance is kept.
    pub fn scale(&self, c: Complex64) -> Self {
        let provenance = match self.provenance {
            Provenance::TruncatedExp { lambda, terms, scale } => Provenance::TruncatedExp {
                lambda,
                terms,
                scale: scale * c,
            },
            p if c == Complex64::new(1.0, 0.0) => p,
            _ => Provenance::User,
        };
        Self::with_provenance(self.coeffs.iter().map(|x| x * c).collect(), provenance)
    }

    /// `a * self + b * other`
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| a * self.coeff(k) + b * other.coeff(k)).collect())
    }

    pub fn derivative(&self) -> Self {
        let c: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        let provenance = match self.provenance {
            Provenance::TruncatedExp { lambda, terms, scale } if terms > 1 => {
                Provenance::TruncatedExp {
                    lambda,
                    terms: terms - 1,
                    scale: scale * lambda,
                }
            }
            _ => Provenance::User,
        };
        Self::with_provenance(c, provenance)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Complex64::new(0.0, 0.0));
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Self::new(c)
    }

    /// Horner evaluation with a lazily renormalized accumulator.
    pub fn evaluate(&self, z: Complex64) -> Hdr {
        horner(&self.coeffs, z)
    }

    /// `ln |f(z)|`
    pub fn ln_abs(&self, z: Complex64) -> f64 {
        self.evaluate(z).ln_abs()
    }

    pub fn evaluate_with_bound(&self, z: Complex64) -> Evaluation {
        let value = self.evaluate(z);
        let abs: Vec<Complex64> = self
            .coeffs
            .iter()
            .map(|c| Complex64::new(c.norm(), 0.0))
            .collect();
        let majorant = horner(&abs, Complex64::new(z.norm(), 0.0));
        let condition = (majorant.ln_abs() - value.ln_abs()).exp();
        let tail_rel_bound = self.tail_log_rel_bound(z.norm()).map(f64::exp);
        Evaluation {
            value,
            condition,
            rel_error_bound: 2.0 * self.coeffs.len() as f64 * f64::EPSILON * condition,
            tail_rel_bound,
        }
    }

    /// For truncated exponentials: `ln` of the truncation error bound at
    /// `|z| = radius`, relative to the maximum modulus `|scale| e^{|lambda| R}`
    /// of the full exponential on that circle.
    pub fn tail_log_rel_bound(&self, radius: f64) -> Option<f64> {
        match self.provenance {
            Provenance::TruncatedExp { lambda, terms, .. } => {
                let x = lambda.norm() * radius;
                if x == 0.0 {
                    return Some(f64::NEG_INFINITY);
                }
                let ratio = x / (terms + 1) as f64;
                if ratio >= 1.0 {
                    return Some(f64::INFINITY);
                }
                Some(terms as f64 * x.ln() - ln_factorial(terms) - (1.0 - ratio).ln() - x)
            }
            _ => None,
        }
    }

    /// Largest radius at which the relative tail bound stays below `rel_tol`
    /// (`None` for series without tail information).
    pub fn tail_valid_radius(&self, rel_tol: f64) -> Option<f64> {
        let Provenance::TruncatedExp { lambda, terms, .. } = self.provenance else {
            return None;
        };
        let target = rel_tol.ln();
        let mut lo = 0.0;
        let mut hi = (terms + 1) as f64 / lambda.norm();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tail_log_rel_bound(mid).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// Series as a JSON array of `[re, im]` pairs, index = degree.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        serde_json::to_string(&pairs).expect("coefficients serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SeriesError> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self, SeriesError> {
        if pairs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(i) = pairs.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(SeriesError::NonFinite(i));
        }
        Ok(Self::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()))
    }
}

const RENORM_HI: f64 = 1e120;
const RENORM_LO: f64 = 1e-120;

fn horner(coeffs: &[Complex64], z: Complex64) -> Hdr {
    if !(z.norm() < 1e100) {
        return horner_hdr(coeffs, Hdr::from(z));
    }
    let mut acc = *coeffs.last().expect("nonempty series");
    let mut e: i64 = 0;
    for c in coeffs.iter().rev().skip(1) {
        acc *= z;
        if *c != Complex64::new(0.0, 0.0) {
            let ce = ilogb(c.re.abs().max(c.im.abs()));
            if (ce - e).abs() < 900 {
                acc += Complex64::new(ldexp(c.re, -e), ldexp(c.im, -e));
            } else {
                let h = Hdr::from_parts(acc, e) + Hdr::from(*c);
                acc = h.significand();
                e = h.exponent();
            }
        }
        let m = acc.re.abs().max(acc.im.abs());
        if m > RENORM_HI || (m < RENORM_LO && m != 0.0) {
            let k = ilogb(m);
            acc = Complex64::new(ldexp(acc.re, -k), ldexp(acc.im, -k));
            e += k;
        }
    }
    Hdr::from_parts(acc, e)
}

fn horner_hdr(coeffs: &[Complex64], z: Hdr) -> Hdr {
    let mut acc = Hdr::from(*coeffs.last().expect("nonempty series"));
    for c in coeffs.iter().rev().skip(1) {
        acc = acc * z + Hdr::from(*c);
    }
    acc
}

/// `ln|f(z)| - psi(|z|)`, the log of the weighted modulus; `-inf` at zeros of
/// `f`.
pub fn weighted_log_modulus(f: &EntireFunction, w: &Weight, z: Complex64) -> f64 {
    let l = f.ln_abs(z);
    if l == f64::NEG_INFINITY {
        return l;
    }
    l - w.psi(z.norm())
}

/// Normalized reproducing kernel of the classical Fock space,
/// `k_w(z) = exp(<z, w> - |w|^2 / 2)` with `<z, w> = z conj(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalKernel {
    pub w: Complex64,
}

impl ClassicalKernel {
    pub fn new(w: Complex64) -> Self {
        ClassicalKernel { w }
    }

    fn exponent(&self, z: Complex64) -> Complex64 {
        z * self.w.conj() - 0.5 * self.w.norm_sqr()
    }

    pub fn ln_abs(&self, z: Complex64) -> f64 {
        self.exponent(z).re
    }

    pub fn evaluate(&self, z: Complex64) -> Hdr {
        let a = self.exponent(z);
        let k = (a.re / std::f64::consts::LN_2).floor();
        let rest = a.re - k * std::f64::consts::LN_2;
        Hdr::from_parts(Complex64::from_polar(rest.exp(), a.im), k as i64)
    }

    /// `ln|k_w(z)| - |z|^2/2`, which equals `-|z - w|^2 / 2`.
    pub fn weighted_ln_abs(&self, z: Complex64) -> f64 {
        self.ln_abs(z) - 0.5 * z.norm_sqr()
    }

    /// Taylor series truncated to `terms` coefficients.
    pub fn to_series(&self, terms: usize) -> EntireFunction {
        let scale = (-0.5 * self.w.norm_sqr()).exp();
        EntireFunction::truncated_exp(self.w.conj(), terms).scale(Complex64::new(scale, 0.0))
    }
}
