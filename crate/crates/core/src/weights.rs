//! Radial weights `psi`, their derivatives, the radial Laplacian and the
//! radius function `tau = (1 + Laplacian)^{-1/2}`.
//!
//! Every quantity has a log-domain accessor; the super-exponential family
//! overflows `f64` already at `r ~ 6.6` while its logarithm stays finite far
//! beyond that.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{ln_add, ln_add_signed, ls_slope, SignedLog};
use crate::profile::{geometric_points, GrowthProfile};
use crate::weight_expr::{self, Expr, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("non-positive Laplacian at r = {r}")]
    NonPositiveLaplacian { r: f64 },
    #[error("unrecognized weight spec `{0}` (expected power:m, exp:a, superexp:a, gaussian or expr:<text>)")]
    UnknownSpec(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    /// `psi(r) = r^m`
    Power(f64),
    /// `psi(r) = e^{alpha r}`
    ExpLinear(f64),
    /// `psi(r) = e^{e^{alpha r}}`
    SuperExp(f64),
    /// `psi(r) = r^2 / 2`
    ClassicalGaussian,
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
struct ExprDerivatives {
    first: Expr,
    second: Expr,
}

/// An immutable radial weight with exact first and second derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Weight {
    source: WeightSource,
    derivs: Option<Box<ExprDerivatives>>,
}

impl Weight {
    /// Builds a weight, rejecting power exponents `m <= 2` (not faster than
    /// the Gaussian).
    pub fn new(source: WeightSource) -> Result<Self, WeightError> {
        if let WeightSource::Power(m) = source {
            if m > 0.0 && m <= 2.0 {
                return Err(WeightError::InvalidParameter(format!(
                    "power exponent {m} <= 2 is not admissible; use Weight::new_permissive"
                )));
            }
        }
        Self::new_permissive(source)
    }

    /// Like [`Weight::new`] but accepts any positive power exponent.
    pub fn new_permissive(source: WeightSource) -> Result<Self, WeightError> {
        match &source {
            WeightSource::Power(m) if !(*m > 0.0 && m.is_finite()) => {
                return Err(WeightError::InvalidParameter(format!(
                    "power exponent must be positive, got {m}"
                )))
            }
            WeightSource::ExpLinear(a) | WeightSource::SuperExp(a) if !(*a > 0.0 && a.is_finite()) => {
                return Err(WeightError::InvalidParameter(format!(
                    "alpha must be positive, got {a}"
                )))
            }
            _ => {}
        }
        let derivs = match &source {
            WeightSource::Expr(e) => {
                let first = e.differentiate();
                let second = first.differentiate();
                Some(Box::new(ExprDerivatives { first, second }))
            }
            _ => None,
        };
        Ok(Weight { source, derivs })
    }

    pub fn power(m: f64) -> Result<Self, WeightError> {
        Self::new(WeightSource::Power(m))
    }

    pub fn exp_linear(alpha: f64) -> Result<Self, WeightError> {
        Self::new(WeightSource::ExpLinear(alpha))
    }

    pub fn super_exp(alpha: f64) -> Result<Self, WeightError> {
        Self::new(WeightSource::SuperExp(alpha))
    }

    pub fn gaussian() -> Self {
        Weight {
            source: WeightSource::ClassicalGaussian,
            derivs: None,
        }
    }

    pub fn from_expr(text: &str) -> Result<Self, WeightError> {
        Self::new(WeightSource::Expr(weight_expr::parse(text)?))
    }

    pub fn source(&self) -> &WeightSource {
        &self.source
    }

    /// Exponent `m` when this is the power weight `r^m`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.source {
            WeightSource::Power(m) => Some(m),
            _ => None,
        }
    }

    fn d(&self) -> &ExprDerivatives {
        self.derivs.as_deref().expect("expression weight carries derivatives")
    }

    pub fn psi(&self, r: f64) -> f64 {
        match &self.source {
            WeightSource::Power(m) => r.powf(*m),
            WeightSource::ExpLinear(a) => (a * r).exp(),
            WeightSource::SuperExp(a) => (a * r).exp().exp(),
            WeightSource::ClassicalGaussian => 0.5 * r * r,
            WeightSource::Expr(e) => {
                let v = e.eval(r);
                if v.is_finite() {
                    v
                } else {
                    e.eval_signed_log(r).to_f64()
                }
            }
        }
    }

    /// `ln psi(r)` (signed, since expression weights may vanish or go negative).
    pub fn ln_psi(&self, r: f64) -> SignedLog {
        match &self.source {
            WeightSource::Power(m) => SignedLog::positive(m * r.ln()),
            WeightSource::ExpLinear(a) => SignedLog::positive(a * r),
            WeightSource::SuperExp(a) => SignedLog::positive((a * r).exp()),
            WeightSource::ClassicalGaussian => SignedLog::positive(2.0 * r.ln() - 2f64.ln()),
            WeightSource::Expr(e) => e.eval_signed_log(r),
        }
    }

    pub fn psi_prime(&self, r: f64) -> f64 {
        self.ln_psi_prime(r).to_f64()
    }

    pub fn ln_psi_prime(&self, r: f64) -> SignedLog {
        match &self.source {
            WeightSource::Power(m) => {
                if r == 0.0 {
                    if *m > 1.0 {
                        SignedLog::ZERO
                    } else if *m == 1.0 {
                        SignedLog::positive(0.0)
                    } else {
                        SignedLog::positive(f64::INFINITY)
                    }
                } else {
                    SignedLog::positive(m.ln() + (m - 1.0) * r.ln())
                }
            }
            WeightSource::ExpLinear(a) => SignedLog::positive(a.ln() + a * r),
            WeightSource::SuperExp(a) => SignedLog::positive(a.ln() + a * r + (a * r).exp()),
            WeightSource::ClassicalGaussian => SignedLog::from_f64(r),
            WeightSource::Expr(_) => self.d().first.eval_signed_log(r),
        }
    }

    pub fn psi_second(&self, r: f64) -> f64 {
        self.ln_psi_second(r).to_f64()
    }

    pub fn ln_psi_second(&self, r: f64) -> SignedLog {
        match &self.source {
            WeightSource::Power(m) => {
                let c = m * (m - 1.0);
                SignedLog::from_f64(c).mul(if r == 0.0 {
                    SignedLog::from_f64(0f64.powf(m - 2.0))
                } else {
                    SignedLog::positive((m - 2.0) * r.ln())
                })
            }
            WeightSource::ExpLinear(a) => SignedLog::positive(2.0 * a.ln() + a * r),
            WeightSource::SuperExp(a) => {
                let u = (a * r).exp();
                SignedLog::positive(2.0 * a.ln() + a * r + u.ln_1p() + u)
            }
            WeightSource::ClassicalGaussian => SignedLog::positive(0.0),
            WeightSource::Expr(_) => self.d().second.eval_signed_log(r),
        }
    }

    /// `ln(1 + psi'(r))`; requires `psi' > -1`.
    pub fn ln_one_plus_psi_prime(&self, r: f64) -> f64 {
        let d = self.ln_psi_prime(r);
        match d.sign {
            0 => 0.0,
            1 => ln_add(0.0, d.ln),
            _ => (1.0 - d.ln.exp()).ln(),
        }
    }

    /// Radial Laplacian `psi'' + psi'/r`; at the origin the smooth radial
    /// limit `2 psi''(0)`, or `+inf` when `psi'(0) != 0` (the weight has a
    /// cone point there). A value `<= 0` signals an inadmissible weight.
    pub fn laplacian(&self, r: f64) -> f64 {
        self.ln_laplacian(r).to_f64()
    }

    pub fn ln_laplacian(&self, r: f64) -> SignedLog {
        if r == 0.0 {
            if self.ln_psi_prime(0.0).sign != 0 {
                return SignedLog::positive(f64::INFINITY);
            }
            return SignedLog::from_f64(2.0).mul(self.ln_psi_second(0.0));
        }
        match &self.source {
            WeightSource::Power(m) => SignedLog::positive(2.0 * m.ln() + (m - 2.0) * r.ln()),
            WeightSource::ExpLinear(a) => SignedLog::positive(a.ln() + a * r + (a + 1.0 / r).ln()),
            WeightSource::SuperExp(a) => {
                let u = (a * r).exp();
                SignedLog::positive(a.ln() + a * r + u + (a * (1.0 + u) + 1.0 / r).ln())
            }
            WeightSource::ClassicalGaussian => SignedLog::positive(2f64.ln()),
            WeightSource::Expr(_) => {
                let over_r = self.ln_psi_prime(r).div(SignedLog::from_f64(r));
                ln_add_signed(self.ln_psi_second(r), over_r)
            }
        }
    }

    fn checked_ln_laplacian(&self, r: f64) -> Result<f64, WeightError> {
        let l = self.ln_laplacian(r);
        if l.ln.is_nan() || l.sign < 0 || (l.sign == 0 && r > 0.0) {
            return Err(WeightError::NonPositiveLaplacian { r });
        }
        Ok(l.ln)
    }

    /// `ln tau(r) = -1/2 ln(1 + Laplacian(r))`.
    pub fn ln_tau(&self, r: f64) -> Result<f64, WeightError> {
        Ok(-0.5 * ln_add(0.0, self.checked_ln_laplacian(r)?))
    }

    pub fn tau(&self, r: f64) -> Result<f64, WeightError> {
        Ok(self.ln_tau(r)?.exp())
    }

    /// `d/dr ln tau` by a central difference (one-sided next to the origin).
    pub fn d_ln_tau(&self, r: f64) -> Result<f64, WeightError> {
        let h = 1e-4 * r.max(0.01);
        if r < h {
            let a = self.ln_tau(r)?;
            let b = self.ln_tau(r + h)?;
            let c = self.ln_tau(r + 2.0 * h)?;
            return Ok((-3.0 * a + 4.0 * b - c) / (2.0 * h));
        }
        Ok((self.ln_tau(r + h)? - self.ln_tau(r - h)?) / (2.0 * h))
    }

    pub fn tau_prime(&self, r: f64) -> Result<f64, WeightError> {
        Ok(self.tau(r)? * self.d_ln_tau(r)?)
    }

    /// `ln |tau'(r)|`.
    pub fn ln_abs_tau_prime(&self, r: f64) -> Result<f64, WeightError> {
        Ok(self.ln_tau(r)? + self.d_ln_tau(r)?.abs().ln())
    }

    /// Profile of `ln tau` on a geometric grid over `[1, r_max]`.
    pub fn tau_profile(&self, r_max: f64, n: usize) -> Result<GrowthProfile, WeightError> {
        let radii = geometric_points(1.0, r_max, n);
        let vals = radii
            .iter()
            .map(|r| self.ln_tau(*r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GrowthProfile::new(radii, vals))
    }

    /// Canonical spec string, e.g. `power:4`.
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            WeightSource::Power(m) => write!(f, "power:{m}"),
            WeightSource::ExpLinear(a) => write!(f, "exp:{a}"),
            WeightSource::SuperExp(a) => write!(f, "superexp:{a}"),
            WeightSource::ClassicalGaussian => write!(f, "gaussian"),
            WeightSource::Expr(e) => write!(f, "expr:{e}"),
        }
    }
}

impl FromStr for Weight {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "gaussian" {
            return Ok(Weight::gaussian());
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| WeightError::UnknownSpec(s.to_string()))?;
        let num = || {
            arg.trim()
                .parse::<f64>()
                .map_err(|_| WeightError::InvalidParameter(format!("`{arg}` is not a number")))
        };
        match kind {
            "power" => Weight::power(num()?),
            "exp" => Weight::exp_linear(num()?),
            "superexp" => Weight::super_exp(num()?),
            "expr" => Weight::from_expr(arg),
            _ => Err(WeightError::UnknownSpec(s.to_string())),
        }
    }
}

impl TryFrom<String> for Weight {
    type Error = WeightError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Weight> for String {
    fn from(w: Weight) -> String {
        w.spec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtraCondition {
    /// `tau(r) r^C` increases over the tested range.
    TauRCIncreasing(f64),
    /// `tau'(r) ln(1/tau(r)) -> 0`.
    TauPrimeLogVanishes,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub weight: String,
    pub laplacian_positive: bool,
    pub tau_vanishes: bool,
    pub tau_prime_vanishes: bool,
    pub extra_condition: ExtraCondition,
    pub faster_than_gaussian: bool,
    /// Smallest sampled radius from which `(1 + psi')/psi' <= 1.01` holds on
    /// the rest of the grid.
    pub large_psi_prime_radius: Option<f64>,
    pub verdict: bool,
    /// Largest audited radius; below the requested `r_max` when the weight
    /// leaves the representable range first.
    pub audited_radius: f64,
    pub radii: Vec<f64>,
    pub ln_tau: Vec<f64>,
    pub ln_laplacian: Vec<f64>,
}

const C_CANDIDATES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn falls_with_slope(ln_r: &[f64], v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
        && strictly_decreasing(v)
        && ls_slope(ln_r, v) < -crate::profile::SLOPE_DEAD_BAND
}

fn representable(w: &Weight, r: f64) -> bool {
    let below_inf = |x: f64| x < f64::INFINITY;
    below_inf(w.ln_psi_prime(r).ln)
        && below_inf(w.ln_laplacian(r).ln)
        && w.ln_tau(r).map_or(true, f64::is_finite)
        && w.d_ln_tau(r).map_or(true, f64::is_finite)
}

/// Audits the admissibility conditions on a geometric grid over `[1, r_max]`.
/// The grid stops before the first radius where even the log-domain
/// quantities overflow; asymptotic conditions are judged over the last
/// decade of what remains.
pub fn check_admissibility(w: &Weight, r_max: f64, n_samples: usize) -> AdmissibilityReport {
    assert!(r_max >= 10.0 && n_samples >= 50, "need r_max >= 10 and n_samples >= 50");
    let mut radii = geometric_points(1.0, r_max, n_samples);
    let cut = radii.iter().position(|r| !representable(w, *r)).unwrap_or(radii.len());
    radii.truncate(cut.max(1));
    let r_max = *radii.last().expect("grid is non-empty");
    let ln_lap: Vec<SignedLog> = radii.iter().map(|r| w.ln_laplacian(*r)).collect();
    let laplacian_positive = ln_lap.iter().all(|l| l.sign > 0 && !l.ln.is_nan());
    let ln_tau: Vec<f64> = radii.iter().map(|r| w.ln_tau(*r).unwrap_or(f64::NAN)).collect();

    let decade: Vec<usize> = (0..radii.len()).filter(|&i| radii[i] >= r_max / 10.0).collect();
    let ln_r: Vec<f64> = decade.iter().map(|&i| radii[i].ln()).collect();
    let tail = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { decade.iter().map(|&i| f(i)).collect() };

    let tau_tail = tail(&|i| ln_tau[i]);
    let tau_vanishes = laplacian_positive && falls_with_slope(&ln_r, &tau_tail);

    let ln_tp: Vec<f64> = tail(&|i| w.ln_abs_tau_prime(radii[i]).unwrap_or(f64::NAN));
    let tau_prime_vanishes = laplacian_positive && falls_with_slope(&ln_r, &ln_tp);

    let extra_condition = C_CANDIDATES
        .iter()
        .find(|&&c| {
            let v: Vec<f64> = ln_r.iter().zip(&tau_tail).map(|(lr, lt)| lt + c * lr).collect();
            v.iter().all(|x| x.is_finite()) && strictly_increasing(&v)
        })
        .map(|&c| ExtraCondition::TauRCIncreasing(c))
        .unwrap_or_else(|| {
            let v: Vec<f64> = ln_tp
                .iter()
                .zip(&tau_tail)
                .map(|(tp, lt)| tp + (-lt).ln())
                .collect();
            if falls_with_slope(&ln_r, &v) {
                ExtraCondition::TauPrimeLogVanishes
            } else {
                ExtraCondition::Neither
            }
        });

    let growth: Vec<f64> = tail(&|i| {
        let d = w.ln_psi_prime(radii[i]);
        if d.sign > 0 {
            d.ln - radii[i].ln()
        } else {
            f64::NAN
        }
    });
    let faster_than_gaussian = growth.iter().all(|x| x.is_finite())
        && strictly_increasing(&growth)
        && ls_slope(&ln_r, &growth) > crate::profile::SLOPE_DEAD_BAND;

    let bound = 1.01f64.ln();
    let mut large_psi_prime_radius = None;
    for (i, r) in radii.iter().enumerate().rev() {
        let d = w.ln_psi_prime(*r);
        if d.sign > 0 && w.ln_one_plus_psi_prime(*r) - d.ln <= bound {
            large_psi_prime_radius = Some(radii[i]);
        } else {
            break;
        }
    }

    let verdict = r_max >= 10.0
        && laplacian_positive
        && tau_vanishes
        && tau_prime_vanishes
        && extra_condition != ExtraCondition::Neither
        && faster_than_gaussian;

    AdmissibilityReport {
        weight: w.spec(),
        laplacian_positive,
        tau_vanishes,
        tau_prime_vanishes,
        extra_condition,
        faster_than_gaussian,
        large_psi_prime_radius,
        verdict,
        audited_radius: r_max,
        radii,
        ln_tau,
        ln_laplacian: ln_lap.iter().map(|l| if l.sign > 0 { l.ln } else { f64::NAN }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn builtin_values() {
        let w = Weight::power(4.0).unwrap();
        assert_eq!(w.psi(2.0), 16.0);
        assert!(rel(w.psi_prime(2.0), 32.0) < 1e-14);
        assert!(rel(w.laplacian(2.0), 64.0) < 1e-14);
        let e = Weight::exp_linear(1.0).unwrap();
        assert!(rel(e.psi_prime(1.3), 1.3f64.exp()) < 1e-14);
        assert!(rel(e.laplacian(1.0), 2.0 * std::f64::consts::E) < 1e-14);
        let g = Weight::gaussian();
        for r in [0.0, 0.7, 5.0] {
            assert!(rel(g.laplacian(r), 2.0) < 1e-15);
            assert!(rel(g.tau(r).unwrap(), 3f64.powf(-0.5)) < 1e-15);
        }
    }

    #[test]
    fn expression_weight_second_derivative() {
        let w = Weight::from_expr("exp(r)+r^2").unwrap();
        for r in [0.5, 1.0, 2.5] {
            assert!(rel(w.psi_second(r), r.exp() + 2.0) < 1e-13);
        }
    }

    #[test]
    fn laplacian_at_origin_is_radial_limit() {
        let g = Weight::from_expr("r^2/2").unwrap();
        assert!(rel(g.laplacian(0.0), 2.0) < 1e-15);
        assert_eq!(Weight::power(4.0).unwrap().laplacian(0.0), 0.0);
        assert_eq!(Weight::power(4.0).unwrap().tau(0.0).unwrap(), 1.0);
        // psi'(0) = 1.5, so psi'/r blows up at the origin
        let e = Weight::exp_linear(1.5).unwrap();
        assert_eq!(e.laplacian(0.0), f64::INFINITY);
        assert_eq!(e.tau(0.0).unwrap(), 0.0);
        assert!(e.laplacian(1e-9) > 1e9);
    }

    #[test]
    fn super_exponential_tau_in_log_domain() {
        // ln tau = -1/2 ln(1 + (e^{2r} + e^r) e^{e^r} + e^{r + e^r}/r), evaluated by hand
        let w = Weight::super_exp(1.0).unwrap();
        let r: f64 = 2.0;
        let er = r.exp();
        let lap = (2.0 * r).exp() * er.exp() + er * er.exp() + (r + er).exp() / r;
        let want = -0.5 * (1.0 + lap).ln();
        assert!(rel(w.ln_tau(r).unwrap(), want) < 1e-13);
        // and far past f64 overflow of the weight itself
        assert!(w.ln_tau(30.0).unwrap().is_finite());
        assert!(w.psi(8.0).is_infinite());
        assert!(w.ln_psi(8.0).ln.is_finite());
    }

    #[test]
    fn tau_matches_inverse_root_laplacian_asymptotically() {
        let w = Weight::power(4.0).unwrap();
        for r in [10.0, 100.0, 1000.0] {
            let x = w.tau(r).unwrap() * w.laplacian(r).sqrt();
            assert!((x - 1.0).abs() < 1.0 / (32.0 * r * r));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(Weight::power(0.0), Err(WeightError::InvalidParameter(_))));
        assert!(matches!(Weight::power(2.0), Err(WeightError::InvalidParameter(_))));
        assert!(Weight::new_permissive(WeightSource::Power(2.0)).is_ok());
        assert!(matches!(Weight::exp_linear(-1.0), Err(WeightError::InvalidParameter(_))));
        assert!(matches!(Weight::super_exp(0.0), Err(WeightError::InvalidParameter(_))));
    }

    #[test]
    fn non_positive_laplacian_is_flagged() {
        let w = Weight::from_expr("10 - r^2").unwrap();
        assert!(w.laplacian(1.0) < 0.0);
        assert_eq!(w.tau(1.0), Err(WeightError::NonPositiveLaplacian { r: 1.0 }));
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["power:4", "exp:1", "superexp:0.5", "gaussian", "expr:exp(r) + r^2"] {
            let w: Weight = s.parse().unwrap();
            assert_eq!(w.spec(), s);
        }
        assert!(matches!("cosh:1".parse::<Weight>(), Err(WeightError::UnknownSpec(_))));
        assert!(matches!("expr:y".parse::<Weight>(), Err(WeightError::Expr(_))));
    }

    #[test]
    fn admissibility_of_the_standard_families() {
        for s in ["power:3", "power:4", "exp:1", "superexp:1"] {
            let w: Weight = s.parse().unwrap();
            let rep = check_admissibility(&w, 100.0, 200);
            assert!(rep.verdict, "{s}: {rep:?}");
            assert!(rep.large_psi_prime_radius.unwrap() <= 10.0, "{s}");
        }
        let rep = check_admissibility(&Weight::gaussian(), 100.0, 200);
        assert!(!rep.faster_than_gaussian);
        assert!(!rep.verdict);
        let rep = check_admissibility(&Weight::power(4.0).unwrap(), 100.0, 200);
        assert_eq!(rep.extra_condition, ExtraCondition::TauRCIncreasing(1.0));
        let rep = check_admissibility(&Weight::exp_linear(1.0).unwrap(), 100.0, 200);
        assert_eq!(rep.extra_condition, ExtraCondition::TauPrimeLogVanishes);
    }
}
