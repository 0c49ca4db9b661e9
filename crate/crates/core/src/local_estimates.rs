//! Local estimates on disks `D(z, sigma tau(z))`: the subharmonic mean-value
//! ratio, comparability of `tau` across a disk, and the disk-average
//! characterization of `|h| <~ tau^{2(q-p)/p}` for monomials.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entire::EntireFunction;
use crate::exec;
use crate::numeric::log_sum_exp;
use crate::profile::{geometric_grid, GrowthProfile};
use crate::quadrature::gauss_legendre;
use crate::weights::{Weight, WeightError};

pub const DEFAULT_SIGMA: f64 = 0.1;
/// Relative tolerance of the disk quadrature.
pub const DISK_RTOL: f64 = 1e-8;
const DISK_START: (usize, usize) = (8, 16);
const DISK_MAX_RADIAL: usize = 512;
/// Radius grid of the disk-average profiles.
pub const EQUIVALENCE_RADIUS_CAP: f64 = 1000.0;
pub const EQUIVALENCE_GRID_RATIO: f64 = 1.15;
/// Radius range `[1, COMPARABILITY_RADIUS]` of `tau_comparability`; near
/// the origin `tau` of a weight with `psi'(0) != 0` vanishes like `r^{1/2}`.
pub const COMPARABILITY_RADIUS: f64 = 20.0;
const COMPARABILITY_SPOKES: usize = 16;
/// Survey points are drawn where `psi <= SURVEY_PSI_MAX`.
pub const SURVEY_PSI_MAX: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocalError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("disk quadrature did not reach relative {rtol} with {nodes} radial nodes (last change {change})")]
    Quadrature { rtol: f64, nodes: usize, change: f64 },
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalParams {
    pub sigma: f64,
    pub beta: f64,
}

impl LocalParams {
    pub fn new(sigma: f64, beta: f64) -> Result<Self, LocalError> {
        if !(sigma > 0.0 && sigma <= 0.5) {
            return Err(LocalError::InvalidParameter(format!("sigma = {sigma} not in (0, 0.5]")));
        }
        if !beta.is_finite() {
            return Err(LocalError::InvalidParameter(format!("beta = {beta}")));
        }
        Ok(LocalParams { sigma, beta })
    }
}

impl Default for LocalParams {
    fn default() -> Self {
        LocalParams {
            sigma: DEFAULT_SIGMA,
            beta: 1.0,
        }
    }
}

fn disk_rule(center: Complex64, rho: f64, n: usize, m: usize, ln_f: &dyn Fn(Complex64) -> f64) -> f64 {
    let (x, wt) = gauss_legendre(n);
    let mut terms = Vec::with_capacity(n * m);
    for (xi, wi) in x.iter().zip(&wt) {
        let s = 0.5 * rho * (xi + 1.0);
        let ln_w = (0.5 * rho * wi * s * TAU / m as f64).ln();
        for j in 0..m {
            let z = center + Complex64::from_polar(s, TAU * j as f64 / m as f64);
            terms.push(ln_f(z) + ln_w);
        }
    }
    log_sum_exp(&terms)
}

/// `ln int_{D(center, rho)} e^{ln_f} dm` by radial Gauss-Legendre times an
/// angular trapezoid rule, both doubled until successive logs differ by less
/// than [`DISK_RTOL`].
pub fn ln_disk_integral(
    center: Complex64,
    rho: f64,
    ln_f: &dyn Fn(Complex64) -> f64,
) -> Result<f64, LocalError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(LocalError::InvalidParameter(format!("disk radius {rho}")));
    }
    let (mut n, mut m) = DISK_START;
    let mut prev = disk_rule(center, rho, n, m, ln_f);
    loop {
        n *= 2;
        m *= 2;
        let next = disk_rule(center, rho, n, m, ln_f);
        let change = (next - prev).abs();
        if change <= DISK_RTOL || (next == f64::NEG_INFINITY && prev == next) {
            return Ok(next);
        }
        if n >= DISK_MAX_RADIAL {
            return Err(LocalError::Quadrature {
                rtol: DISK_RTOL,
                nodes: n,
                change,
            });
        }
        prev = next;
    }
}

/// `ln` of `|f(z)|^p e^{-beta psi(z)}` divided by its average over
/// `D(z, sigma tau(z))` normalized by `sigma^2 tau(z)^2`.
pub fn ln_subharmonic_mean_ratio(
    f: &EntireFunction,
    w: &Weight,
    p: f64,
    params: &LocalParams,
    z: Complex64,
) -> Result<f64, LocalError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(LocalError::InvalidParameter(format!("p = {p} must be finite and positive")));
    }
    if f.is_zero() {
        return Err(LocalError::InvalidParameter("f is identically zero".into()));
    }
    let ln_rho = params.sigma.ln() + w.ln_tau(z.norm())?;
    let beta = params.beta;
    let ln_g = |u: Complex64| {
        let a = p * f.ln_abs(u);
        if beta == 0.0 {
            a
        } else {
            a - beta * w.psi(u.norm())
        }
    };
    let ln_int = ln_disk_integral(z, ln_rho.exp(), &ln_g)?;
    Ok(ln_g(z) - (ln_int - 2.0 * ln_rho))
}

pub fn subharmonic_mean_ratio(
    f: &EntireFunction,
    w: &Weight,
    p: f64,
    params: &LocalParams,
    z: Complex64,
) -> Result<f64, LocalError> {
    ln_subharmonic_mean_ratio(f, w, p, params, z).map(f64::exp)
}

/// Radius where `psi` reaches `level`, capped at `cap`.
fn psi_level_radius(w: &Weight, level: f64, cap: f64) -> f64 {
    if w.psi(cap) <= level {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if w.psi(mid) <= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Functions cycled through by [`subharmonic_survey`].
pub fn survey_family() -> Vec<EntireFunction> {
    let mut out: Vec<EntireFunction> = [0, 1, 2, 3, 5, 8].into_iter().map(EntireFunction::monomial).collect();
    out.push(EntireFunction::from_real(&[1.0, 3.0, 3.0, 1.0]));
    out.push(EntireFunction::from_real(&[-1.0, 0.0, 1.0]));
    out.push(EntireFunction::truncated_exp(Complex64::new(0.5, 0.0), 40));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Survey {
    pub weight: String,
    pub p: f64,
    pub params: LocalParams,
    pub radius: f64,
    pub points: Vec<Complex64>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// Mean-value ratios at `samples` deterministic points of the disk where
/// `psi <= SURVEY_PSI_MAX` (at most radius 50), cycling through
/// [`survey_family`]. Points follow an additive recurrence with irrational
/// steps, so reruns are identical.
pub fn subharmonic_survey(
    w: &Weight,
    p: f64,
    params: &LocalParams,
    samples: usize,
) -> Result<Survey, LocalError> {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_2;
    let radius = psi_level_radius(w, SURVEY_PSI_MAX, 50.0);
    let family = survey_family();
    let points: Vec<Complex64> = (1..=samples)
        .map(|i| {
            let u = (0.5 + A1 * i as f64).fract();
            let v = (0.5 + A2 * i as f64).fract();
            Complex64::from_polar(radius * u.sqrt(), TAU * v)
        })
        .collect();
    let ratios = exec::map_range(samples, |i| {
        subharmonic_mean_ratio(&family[i % family.len()], w, p, params, points[i])
    })
    .into_iter()
    .collect::<Result<Vec<f64>, _>>()?;
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(Survey {
        weight: w.spec(),
        p,
        params: *params,
        radius,
        points,
        ratios,
        max_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauComparability {
    pub sigma: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

impl TauComparability {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Extremes of `tau(z)/tau(w)` for `w` on `sample_count` evenly spaced radii
/// in `[1, COMPARABILITY_RADIUS]` and `z` on 16 points of
/// `|z - w| = sigma tau(w)`.
pub fn tau_comparability(w: &Weight, sigma: f64, sample_count: usize) -> Result<TauComparability, LocalError> {
    tau_comparability_with(w, sigma, sample_count, COMPARABILITY_RADIUS)
}

pub fn tau_comparability_with(
    w: &Weight,
    sigma: f64,
    sample_count: usize,
    radius: f64,
) -> Result<TauComparability, LocalError> {
    if !(sigma > 0.0 && sigma <= 0.5) {
        return Err(LocalError::InvalidParameter(format!("sigma = {sigma} not in (0, 0.5]")));
    }
    if sample_count < 2 || !(radius > 1.0) {
        return Err(LocalError::InvalidParameter(format!("sample_count = {sample_count}, radius = {radius}")));
    }
    let per_radius = exec::map_range(sample_count, |i| -> Result<(f64, f64), WeightError> {
        let r = 1.0 + (radius - 1.0) * i as f64 / (sample_count - 1) as f64;
        let ln_t = w.ln_tau(r)?;
        let rho = sigma * ln_t.exp();
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for j in 0..COMPARABILITY_SPOKES {
            let z = Complex64::new(r, 0.0) + Complex64::from_polar(rho, TAU * j as f64 / COMPARABILITY_SPOKES as f64);
            let d = w.ln_tau(z.norm())? - ln_t;
            hi = hi.max(d);
            lo = lo.min(d);
        }
        Ok((hi, lo))
    });
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for x in per_radius {
        let (a, b) = x?;
        hi = hi.max(a);
        lo = lo.min(b);
    }
    Ok(TauComparability {
        sigma,
        max_ratio: hi.exp(),
        min_ratio: lo.exp(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCheck {
    pub k: usize,
    pub p: f64,
    pub q: f64,
    pub sigma: f64,
    /// `(1/q) ln(|h|^q tau^{2 - 2q/p})`
    pub side_a: GrowthProfile,
    /// `(1/q) ln(tau^{-2q/p} int_{D(w, sigma tau(w))} |h|^q dm)`
    pub side_b: GrowthProfile,
    pub agree: bool,
}

/// Compares the pointwise condition `|h| <~ tau^{2(q-p)/(pq)}`-type profile
/// with the disk-average profile for `h = z^k` on the grid `1.15^j <= 1000`.
pub fn local_equivalence_check(
    k: usize,
    w: &Weight,
    p: f64,
    q: f64,
    sigma: f64,
) -> Result<EquivalenceCheck, LocalError> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(LocalError::InvalidParameter(format!("{name} = {v} must be finite and positive")));
        }
    }
    if !(sigma > 0.0 && sigma <= 0.5) {
        return Err(LocalError::InvalidParameter(format!("sigma = {sigma} not in (0, 0.5]")));
    }
    let h = EntireFunction::monomial(k);
    let radii = geometric_grid(1.0, EQUIVALENCE_GRID_RATIO, EQUIVALENCE_RADIUS_CAP);
    let rows = exec::map(&radii, |&r| -> Result<(f64, f64), LocalError> {
        let ln_t = w.ln_tau(r)?;
        let z = Complex64::new(r, 0.0);
        let a = (q * h.ln_abs(z) + (2.0 - 2.0 * q / p) * ln_t) / q;
        let ln_int = ln_disk_integral(z, sigma * ln_t.exp(), &|u| q * h.ln_abs(u))?;
        let b = (ln_int - 2.0 * q / p * ln_t) / q;
        Ok((a, b))
    });
    let mut side_a = Vec::with_capacity(radii.len());
    let mut side_b = Vec::with_capacity(radii.len());
    for row in rows {
        let (a, b) = row?;
        side_a.push(a);
        side_b.push(b);
    }
    let side_a = GrowthProfile::new(radii.clone(), side_a);
    let side_b = GrowthProfile::new(radii, side_b);
    let agree = side_a.classification == side_b.classification;
    Ok(EquivalenceCheck {
        k,
        p,
        q,
        sigma,
        side_a,
        side_b,
        agree,
    })
}

/// `1/pi`, the ratio for a constant function with `beta = 0`.
pub const CONSTANT_RATIO: f64 = 1.0 / PI;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gives_one_over_pi() {
        let params = LocalParams::new(0.1, 0.0).unwrap();
        for w in [Weight::gaussian(), Weight::power(4.0).unwrap()] {
            for z in [Complex64::new(0.0, 0.0), Complex64::new(2.0, -1.0)] {
                let r = subharmonic_mean_ratio(&EntireFunction::constant(Complex64::new(3.0, 0.0)), &w, 2.0, &params, z).unwrap();
                assert!((r - CONSTANT_RATIO).abs() < 1e-12, "{r}");
            }
        }
    }

    #[test]
    fn zero_of_f_gives_zero() {
        let r = subharmonic_mean_ratio(
            &EntireFunction::monomial(1),
            &Weight::gaussian(),
            2.0,
            &LocalParams::default(),
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn disk_integral_of_r_squared() {
        // int_{D(0,2)} |u|^2 dm = pi 2^4 / 2
        let v = ln_disk_integral(Complex64::new(0.0, 0.0), 2.0, &|u| 2.0 * u.norm().ln()).unwrap();
        assert!((v - (8.0 * PI).ln()).abs() < 1e-12);
    }

    #[test]
    fn harmonic_mean_value_off_center() {
        // |e^u|^2 = e^{2 Re u}: mean over D(c, rho) is e^{2 Re c} 2 I_1(2 rho)/(2 rho)
        let c = Complex64::new(1.5, 0.5);
        let rho = 0.3;
        let v = ln_disk_integral(c, rho, &|u| 2.0 * u.re).unwrap();
        let x: f64 = 2.0 * rho;
        let i1: f64 = (0..30)
            .map(|m| (x / 2.0).powi(2 * m + 1) / (crate::numeric::ln_factorial(m as usize).exp() * crate::numeric::ln_factorial(m as usize + 1).exp()))
            .sum();
        let expected = 2.0 * c.re + (PI * rho * rho).ln() + (2.0 * i1 / x).ln();
        assert!((v - expected).abs() < 1e-10, "{v} {expected}");
    }

    #[test]
    fn gaussian_tau_is_constant() {
        let c = tau_comparability(&Weight::gaussian(), 0.1, 50).unwrap();
        assert_eq!((c.max_ratio, c.min_ratio), (1.0, 1.0));
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(LocalParams::new(0.0, 1.0).is_err());
        assert!(LocalParams::new(0.6, 1.0).is_err());
        assert!(tau_comparability(&Weight::gaussian(), 0.7, 10).is_err());
    }

    #[test]
    fn equivalence_constant_equal_exponents_bounded() {
        let w = Weight::power(4.0).unwrap();
        let c = local_equivalence_check(0, &w, 2.0, 2.0, 0.1).unwrap();
        assert!(c.agree);
        assert_eq!(c.side_a.classification, crate::profile::Classification::Bounded);
    }
}
