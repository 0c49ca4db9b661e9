//! Norms in `F_p^psi` and their Littlewood-Paley equivalents.
//!
//! Finite `p`: `||f||^p = int |f|^p e^{-p psi} dm`, computed as a radial
//! integral of the angular mean of `|f|^p` (see [`crate::quadrature`]).
//! `p = inf`: `sup |f| e^{-psi}`, by a radial scan of the angular maximum with
//! golden-section refinement in both angle and radius.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::entire::EntireFunction;
use crate::exec;
use crate::numeric::{ln_add, log_sum_exp};
use crate::quadrature::{integrate_radial, scan_grid, TAIL_DROP};
use crate::weights::Weight;

/// Default hard radius cap for norm quadrature.
pub const DEFAULT_RADIUS_CAP: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("integrand still significant at radius cap {cap} (log-log slope {slope:.3})")]
    DivergentIntegral { cap: f64, slope: f64 },
    #[error("exponent must be positive, got {0}")]
    InvalidExponent(f64),
}

/// Integrability exponent `p` in `(0, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self, NormError> {
        if p > 0.0 && p.is_finite() {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else {
            Err(NormError::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Exponent::Infinite
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = NormError;
    fn from_str(s: &str) -> Result<Self, NormError> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            t => Exponent::finite(t.parse().map_err(|_| NormError::InvalidExponent(f64::NAN))?),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::finite(p),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    /// `ln ||f||`
    pub log_value: f64,
    pub p: Exponent,
    pub truncation_radius: f64,
    /// `ln` of the estimated omitted mass (finite `p`) or of the weighted
    /// modulus at the truncation radius (`p = inf`).
    pub tail_log_bound: f64,
    #[serde(rename = "nodes")]
    pub radial_nodes_used: usize,
    /// Supremum search only: the radial profile was still rising at the cap.
    #[serde(default)]
    pub divergent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    pub radius_cap: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            radius_cap: DEFAULT_RADIUS_CAP,
        }
    }
}

/// Uniform angular nodes for `|f|^p` with `deg f = deg`.
pub fn angular_nodes(deg: usize, p: f64) -> usize {
    let mult = if p.is_finite() { p.ceil().max(1.0) as usize } else { 1 };
    (2 * deg * mult + 1).max(8)
}

/// `ln` of the mean of `|f(r e^{i theta})|^p` over `theta`. Exact for
/// monomials.
pub fn ln_angular_mean_pow(f: &EntireFunction, r: f64, p: f64) -> f64 {
    if let Some((n, c)) = f.as_monomial() {
        return p * (c.norm().ln() + if n == 0 { 0.0 } else { n as f64 * r.ln() });
    }
    if r == 0.0 {
        return p * f.coeff(0).norm().ln();
    }
    let m = angular_nodes(f.degree(), p);
    let vals: Vec<f64> = (0..m)
        .map(|j| p * f.ln_abs(Complex64::from_polar(r, TAU * j as f64 / m as f64)))
        .collect();
    log_sum_exp(&vals) - (m as f64).ln()
}

/// Golden-section maximization of `g` on `[a, b]`; ties go to smaller `x`.
pub fn golden_max<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while b - a > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

/// `max_theta ln|f(r e^{i theta})|` and the maximizing angle.
pub fn angular_max_ln_abs(f: &EntireFunction, r: f64) -> (f64, f64) {
    if let Some((n, c)) = f.as_monomial() {
        let v = c.norm().ln() + if n == 0 { 0.0 } else { n as f64 * r.ln() };
        return (v, 0.0);
    }
    if r == 0.0 {
        return (f.coeff(0).norm().ln(), 0.0);
    }
    let m = angular_nodes(f.degree(), 1.0);
    let h = TAU / m as f64;
    let at = |t: f64| f.ln_abs(Complex64::from_polar(r, t));
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..m {
        let t = h * j as f64;
        let v = at(t);
        if v > best.0 {
            best = (v, t);
        }
    }
    let (t, v) = golden_max(at, best.1 - h, best.1 + h, 1e-9);
    if v > best.0 {
        (v, t.rem_euclid(TAU))
    } else {
        best
    }
}

/// Finite-`p` norm with the default radius cap.
pub fn norm_finite_p(f: &EntireFunction, w: &Weight, p: f64) -> Result<NormResult, NormError> {
    norm_finite_p_with(f, w, p, &NormOptions::default())
}

pub fn norm_finite_p_with(
    f: &EntireFunction,
    w: &Weight,
    p: f64,
    opts: &NormOptions,
) -> Result<NormResult, NormError> {
    let exponent = Exponent::finite(p)?;
    let res = integrate_radial(
        |r| ln_angular_mean_pow(f, r, p) - p * w.psi(r) + (TAU * r).ln(),
        opts.radius_cap,
    )
    .map_err(|d| NormError::DivergentIntegral {
        cap: d.cap,
        slope: d.slope,
    })?;
    Ok(NormResult {
        log_value: res.ln_value / p,
        p: exponent,
        truncation_radius: res.truncation_radius,
        tail_log_bound: res.tail_log_bound,
        radial_nodes_used: res.nodes_used,
        divergent: false,
    })
}

/// Location and value of `sup_z ln|f(z)| + extra(|z|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupPoint {
    pub log_value: f64,
    pub radius: f64,
    pub theta: f64,
    pub truncation_radius: f64,
    pub tail_log_value: f64,
    pub nodes: usize,
    pub divergent: bool,
}

/// Supremum of `ln|f(z)| + extra(|z|)` over `|z| <= cap`.
pub fn sup_search<E>(f: &EntireFunction, extra: E, cap: f64) -> SupPoint
where
    E: Fn(f64) -> f64 + Sync + Send,
{
    let profile = |r: f64| {
        let (v, t) = angular_max_ln_abs(f, r);
        let e = extra(r);
        (if v == f64::NEG_INFINITY { v } else { v + e }, t)
    };
    let grid = scan_grid(cap);
    let mut vals: Vec<(f64, f64)> = Vec::new();
    let mut best = 0usize;
    let mut cut = None;
    'scan: for chunk in grid.chunks(32) {
        for v in exec::map(chunk, |r| profile(*r)) {
            let i = vals.len();
            vals.push(v);
            if v.0 > vals[best].0 {
                best = i;
            }
            if vals[best].0 > f64::NEG_INFINITY && i > best && v.0 < vals[best].0 - TAIL_DROP {
                cut = Some(i);
                break 'scan;
            }
        }
    }
    let n = vals.len();
    let divergent = cut.is_none() && n >= 2 && vals[n - 1].0 >= vals[n - 2].0;
    let end = cut.unwrap_or(n - 1);
    let mut out = SupPoint {
        log_value: vals[best].0,
        radius: grid[best],
        theta: vals[best].1,
        truncation_radius: grid[end],
        tail_log_value: vals[end].0,
        nodes: n,
        divergent,
    };
    if out.log_value == f64::NEG_INFINITY || divergent {
        return out;
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n - 1)];
    if b > a {
        let (r, v) = golden_max(|r| profile(r).0, a, b, 1e-9 * b.max(1.0));
        if v > out.log_value {
            out.log_value = v;
            out.radius = r;
            out.theta = profile(r).1;
        }
    }
    out
}

/// `||f||_{F_inf^psi}` with the default radius cap.
pub fn norm_sup(f: &EntireFunction, w: &Weight) -> NormResult {
    norm_sup_with(f, w, &NormOptions::default())
}

pub fn norm_sup_with(f: &EntireFunction, w: &Weight, opts: &NormOptions) -> NormResult {
    let s = sup_search(f, |r| -w.psi(r), opts.radius_cap);
    NormResult {
        log_value: s.log_value,
        p: Exponent::Infinite,
        truncation_radius: s.truncation_radius,
        tail_log_bound: s.tail_log_value,
        radial_nodes_used: s.nodes,
        divergent: s.divergent,
    }
}

/// Norm for any exponent.
pub fn norm(f: &EntireFunction, w: &Weight, p: Exponent) -> Result<NormResult, NormError> {
    norm_with(f, w, p, &NormOptions::default())
}

pub fn norm_with(
    f: &EntireFunction,
    w: &Weight,
    p: Exponent,
    opts: &NormOptions,
) -> Result<NormResult, NormError> {
    match p {
        Exponent::Finite(p) => norm_finite_p_with(f, w, p, opts),
        Exponent::Infinite => Ok(norm_sup_with(f, w, opts)),
    }
}

/// `ln (|f(0)|^p + int |f'|^p e^{-p psi} / (1 + psi')^p dm)^{1/p}`
pub fn littlewood_paley_p(
    f: &EntireFunction,
    w: &Weight,
    p: f64,
) -> Result<NormResult, NormError> {
    littlewood_paley_p_with(f, w, p, &NormOptions::default())
}

pub fn littlewood_paley_p_with(
    f: &EntireFunction,
    w: &Weight,
    p: f64,
    opts: &NormOptions,
) -> Result<NormResult, NormError> {
    let exponent = Exponent::finite(p)?;
    let df = f.derivative();
    let res = integrate_radial(
        |r| {
            ln_angular_mean_pow(&df, r, p) - p * (w.psi(r) + w.ln_one_plus_psi_prime(r))
                + (TAU * r).ln()
        },
        opts.radius_cap,
    )
    .map_err(|d| NormError::DivergentIntegral {
        cap: d.cap,
        slope: d.slope,
    })?;
    let f0 = p * f.coeff(0).norm().ln();
    Ok(NormResult {
        log_value: ln_add(f0, res.ln_value) / p,
        p: exponent,
        truncation_radius: res.truncation_radius,
        tail_log_bound: res.tail_log_bound,
        radial_nodes_used: res.nodes_used,
        divergent: false,
    })
}

/// `ln (|f(0)| + sup |f'| e^{-psi} / (1 + psi'))`
pub fn littlewood_paley_sup(f: &EntireFunction, w: &Weight) -> NormResult {
    littlewood_paley_sup_with(f, w, &NormOptions::default())
}

pub fn littlewood_paley_sup_with(f: &EntireFunction, w: &Weight, opts: &NormOptions) -> NormResult {
    let df = f.derivative();
    let s = sup_search(
        &df,
        |r| -w.psi(r) - w.ln_one_plus_psi_prime(r),
        opts.radius_cap,
    );
    NormResult {
        log_value: ln_add(f.coeff(0).norm().ln(), s.log_value),
        p: Exponent::Infinite,
        truncation_radius: s.truncation_radius,
        tail_log_bound: s.tail_log_value,
        radial_nodes_used: s.nodes,
        divergent: s.divergent,
    }
}

/// Littlewood-Paley form for any exponent.
pub fn littlewood_paley(
    f: &EntireFunction,
    w: &Weight,
    p: Exponent,
) -> Result<NormResult, NormError> {
    match p {
        Exponent::Finite(p) => littlewood_paley_p(f, w, p),
        Exponent::Infinite => Ok(littlewood_paley_sup(f, w)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mono(n: usize) -> EntireFunction {
        EntireFunction::monomial(n)
    }

    #[test]
    fn gaussian_constant_and_monomials() {
        let g = Weight::gaussian();
        let one = EntireFunction::constant(Complex64::new(1.0, 0.0));
        let r = norm_finite_p(&one, &g, 2.0).unwrap();
        assert!((2.0 * r.log_value - PI.ln()).abs() < 1e-12);
        let r = norm_finite_p(&mono(3), &g, 2.0).unwrap();
        assert!((r.log_value - 0.5 * (6.0 * PI).ln()).abs() < 1e-12);
        assert!(r.tail_log_bound < 2.0 * r.log_value - 1e12f64.ln());
    }

    #[test]
    fn sup_norm_examples() {
        let g = Weight::gaussian();
        let r = norm_sup(&mono(4), &g);
        assert!((r.log_value - (16f64.ln() - 2.0)).abs() < 1e-12, "{}", r.log_value);
        let one = EntireFunction::constant(Complex64::new(1.0, 0.0));
        let p4 = Weight::power(4.0).unwrap();
        assert_eq!(norm_sup(&one, &p4).log_value, 0.0);
        let r = norm_sup(&mono(1), &p4);
        let r0 = 0.25f64.powf(0.25);
        assert!((r.log_value - (r0.ln() - r0.powi(4))).abs() < 1e-12);
    }

    #[test]
    fn sup_of_non_monomial() {
        // |1 + z| e^{-|z|^2/2} peaks on the positive real axis
        let f = EntireFunction::from_real(&[1.0, 1.0]);
        let w = Weight::gaussian();
        let r = norm_sup(&f, &w);
        let s = sup_search(&f, |r| -w.psi(r), 50.0);
        let (rm, v) = golden_max(|r| (1.0 + r).ln() - 0.5 * r * r, 0.0, 3.0, 1e-12);
        assert!((r.log_value - v).abs() < 1e-10);
        assert!((s.radius - rm).abs() < 1e-6 && s.theta.min(TAU - s.theta) < 1e-6);
    }

    #[test]
    fn littlewood_paley_of_constant() {
        let w = Weight::power(4.0).unwrap();
        let one = EntireFunction::constant(Complex64::new(1.0, 0.0));
        assert_eq!(littlewood_paley_p(&one, &w, 2.0).unwrap().log_value, 0.0);
        assert_eq!(littlewood_paley_sup(&one, &w).log_value, 0.0);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("-1".parse::<Exponent>().is_err());
        let j: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert!(j.is_infinite());
        assert_eq!(serde_json::to_string(&Exponent::Finite(4.0)).unwrap(), "4.0");
    }
}
