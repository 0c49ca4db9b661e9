//! Classifiers and witnesses for boundedness and compactness of `V_g`,
//! `I_g`, `M_g` and `D`.
//!
//! Suprema and limits over the plane become [`GrowthProfile`]s on the grid
//! `r_k = 1.15^k`, `r_k <= radius_cap`. Power weights with polynomial
//! symbols also get an exact exponent comparison; the numeric profile is
//! always attached as a cross-check.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::entire::{EntireFunction, Provenance};
use crate::exec;
use crate::norms::{angular_max_ln_abs, ln_angular_mean_pow, norm, Exponent, NormError, NormResult};
use crate::operators::multiply;
use crate::profile::{geometric_grid, Classification, GrowthProfile};
use crate::quadrature::integrate_radial;
use crate::weight_expr::Rational;
use crate::weights::Weight;

/// Radius cap of the classification grid.
pub const CLASSIFIER_RADIUS_CAP: f64 = 1000.0;
pub const GRID_RATIO: f64 = 1.15;
/// Truncated-exponential symbols are only sampled where the relative tail
/// bound is below this.
pub const TAIL_VALID_RTOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// Tri-state answer; serialized as `true`, `false` or `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    Yes,
    No,
    Inconclusive,
}

impl Tri {
    fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

impl Serialize for Tri {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tri::Yes => s.serialize_bool(true),
            Tri::No => s.serialize_bool(false),
            Tri::Inconclusive => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Tri {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<bool>::deserialize(d)? {
            Some(true) => Tri::Yes,
            Some(false) => Tri::No,
            None => Tri::Inconclusive,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Vg,
    Ig,
    Mg,
    D,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Vg => "V_g",
            OperatorKind::Ig => "I_g",
            OperatorKind::Mg => "M_g",
            OperatorKind::D => "D",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    Profile,
    Integral,
    Symbolic,
}

/// Verdict for an operator `F_p -> F_q`. `compact = Yes` implies
/// `bounded = Yes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorVerdict {
    pub operator: OperatorKind,
    pub p: Exponent,
    pub q: Exponent,
    pub bounded: Tri,
    pub compact: Tri,
    pub evidence_kind: EvidenceKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub profile: Option<GrowthProfile>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub integral: Option<NormResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

/// Degree threshold `beta` (`p = inf`) or `(beta (p - 1) + 2) / p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    /// Exact value when `beta` and `p` are short decimals.
    pub exact: Option<Rational>,
}

impl Threshold {
    /// Sign of `k - threshold`, exact when possible.
    pub fn compare(&self, k: usize) -> std::cmp::Ordering {
        match self.exact {
            Some(t) => Rational::integer(k as i64).cmp(&t),
            None => (k as f64).total_cmp(&self.value),
        }
    }

    /// Integer probes around the threshold: `(t, t + 1)` for an integer
    /// threshold, `(floor t, floor t + 1)` otherwise.
    pub fn probes(&self) -> (usize, usize) {
        let lo = match self.exact {
            Some(t) => t.numer().div_euclid(t.denom()),
            None => self.value.floor() as i64,
        }
        .max(0) as usize;
        (lo, lo + 1)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "{}", self.value),
        }
    }
}

pub fn degree_threshold_power_weight(beta: f64, p: Exponent) -> Result<Threshold, CriteriaError> {
    if !(beta > 2.0) || !beta.is_finite() {
        return Err(CriteriaError::InvalidParameter(format!("beta must exceed 2, got {beta}")));
    }
    let exact = Rational::from_f64(beta).and_then(|b| match p {
        Exponent::Infinite => Some(b),
        Exponent::Finite(p) => {
            let p = Rational::from_f64(p)?;
            b.checked_mul(p.checked_sub(Rational::integer(1))?)?
                .checked_add(Rational::integer(2))?
                .checked_div(p)
        }
    });
    let value = match p {
        Exponent::Infinite => beta,
        Exponent::Finite(p) => (beta * (p - 1.0) + 2.0) / p,
    };
    Ok(Threshold { value, exact })
}

/// Classification grid for a symbol, cut at the tail-valid radius of
/// truncated exponentials.
fn classifier_grid(dg: &EntireFunction, cap: f64) -> Vec<f64> {
    let limit = dg.tail_valid_radius(TAIL_VALID_RTOL).unwrap_or(f64::INFINITY);
    geometric_grid(1.0, GRID_RATIO, cap.min(limit))
}

/// Cuts the profile at the first sample that is not a number or `+inf`
/// (super-exponential weights overflow even in the log domain eventually).
fn finite_prefix(mut radii: Vec<f64>, mut vals: Vec<f64>) -> GrowthProfile {
    let n = vals
        .iter()
        .position(|v| v.is_nan() || *v == f64::INFINITY)
        .unwrap_or(vals.len());
    radii.truncate(n);
    vals.truncate(n);
    GrowthProfile::new(radii, vals)
}

/// Profile of `ln( |g'| (Delta psi)^{1/p} / (1 + psi') )`, angular max per
/// radius (the `(Delta psi)^{1/p}` factor is absent for `p = inf`).
pub fn vg_into_sup_profile(g: &EntireFunction, w: &Weight, p: Exponent, cap: f64) -> GrowthProfile {
    let dg = g.derivative();
    let radii = classifier_grid(&dg, cap);
    let vals = exec::map(&radii, |r| {
        let (m, _) = angular_max_ln_abs(&dg, *r);
        if m == f64::NEG_INFINITY {
            return m;
        }
        let lap = match p {
            Exponent::Infinite => 0.0,
            Exponent::Finite(p) => w.ln_laplacian(*r).ln / p,
        };
        m + lap - w.ln_one_plus_psi_prime(*r)
    });
    finite_prefix(radii, vals)
}

fn symbolic_exponent(g: &EntireFunction, w: &Weight, p: Exponent) -> Option<(usize, Threshold)> {
    let beta = w.power_exponent()?;
    if matches!(g.provenance(), Provenance::TruncatedExp { .. }) {
        return None;
    }
    let t = degree_threshold_power_weight(beta, p).ok()?;
    Some((g.degree(), t))
}

fn verdict_from_class(c: Classification) -> (Tri, Tri) {
    match c {
        Classification::Vanishing => (Tri::Yes, Tri::Yes),
        Classification::Bounded => (Tri::Yes, Tri::No),
        Classification::Divergent => (Tri::No, Tri::No),
        Classification::Inconclusive => (Tri::Inconclusive, Tri::Inconclusive),
    }
}

/// Symbolic class of the criterion quantity for `g` of degree `k` against a
/// power weight with the given threshold.
pub fn symbolic_class(k: usize, t: &Threshold) -> Classification {
    if k == 0 {
        return Classification::Vanishing;
    }
    match t.compare(k) {
        std::cmp::Ordering::Less => Classification::Vanishing,
        std::cmp::Ordering::Equal => Classification::Bounded,
        std::cmp::Ordering::Greater => Classification::Divergent,
    }
}

/// `V_g: F_p -> F_inf`.
pub fn vg_into_sup_classify(g: &EntireFunction, w: &Weight, p: Exponent) -> OperatorVerdict {
    vg_into_sup_classify_with(g, w, p, CLASSIFIER_RADIUS_CAP)
}

pub fn vg_into_sup_classify_with(
    g: &EntireFunction,
    w: &Weight,
    p: Exponent,
    cap: f64,
) -> OperatorVerdict {
    let profile = vg_into_sup_profile(g, w, p, cap);
    let (class, evidence_kind, reason) = match symbolic_exponent(g, w, p) {
        Some((k, t)) => {
            let c = symbolic_class(k, &t);
            let note = if c == profile.classification {
                String::new()
            } else {
                format!("; numeric profile says {:?}", profile.classification)
            };
            (
                c,
                EvidenceKind::Symbolic,
                Some(format!("deg g = {k}, threshold {t}{note}")),
            )
        }
        None => (profile.classification, EvidenceKind::Profile, None),
    };
    let (bounded, compact) = verdict_from_class(class);
    OperatorVerdict {
        operator: OperatorKind::Vg,
        p,
        q: Exponent::Infinite,
        bounded,
        compact,
        evidence_kind,
        profile: Some(profile),
        integral: None,
        reason,
    }
}

/// `V_g: F_inf -> F_p`, bounded iff compact iff `g' / (1 + psi')` is in
/// `L^p(dm)`.
pub fn vg_from_sup_into_p(g: &EntireFunction, w: &Weight, p: f64) -> Result<OperatorVerdict, CriteriaError> {
    vg_from_sup_into_p_with(g, w, p, CLASSIFIER_RADIUS_CAP)
}

pub fn vg_from_sup_into_p_with(
    g: &EntireFunction,
    w: &Weight,
    p: f64,
    cap: f64,
) -> Result<OperatorVerdict, CriteriaError> {
    let q = Exponent::finite(p)?;
    if q.is_infinite() {
        return Err(CriteriaError::InvalidParameter("target exponent must be finite".into()));
    }
    let dg = g.derivative();
    let cap = cap.min(dg.tail_valid_radius(TAIL_VALID_RTOL).unwrap_or(f64::INFINITY));
    let integrand = |r: f64| {
        let v = ln_angular_mean_pow(&dg, r, p) - p * w.ln_one_plus_psi_prime(r)
            + (std::f64::consts::TAU * r).ln();
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut verdict = OperatorVerdict {
        operator: OperatorKind::Vg,
        p: Exponent::Infinite,
        q,
        bounded: Tri::Yes,
        compact: Tri::Yes,
        evidence_kind: EvidenceKind::Integral,
        profile: None,
        integral: None,
        reason: None,
    };
    match integrate_radial(integrand, cap) {
        Ok(res) => {
            verdict.integral = Some(NormResult {
                log_value: res.ln_value / p,
                p: q,
                truncation_radius: res.truncation_radius,
                tail_log_bound: res.tail_log_bound,
                radial_nodes_used: res.nodes_used,
                divergent: false,
            });
        }
        Err(d) => {
            verdict.bounded = Tri::No;
            verdict.compact = Tri::No;
            verdict.reason = Some(format!(
                "integrand not decaying at radius {} (log-log slope {:.3})",
                d.cap, d.slope
            ));
        }
    }
    Ok(verdict)
}

/// Coarse shape of a symbol for the `I_g` / `M_g` verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SymbolKind {
    Zero,
    Constant(Complex64),
    Nonconstant,
}

impl SymbolKind {
    pub fn of(g: &EntireFunction) -> SymbolKind {
        if g.is_zero() {
            SymbolKind::Zero
        } else if g.is_constant() {
            SymbolKind::Constant(g.coeff(0))
        } else {
            SymbolKind::Nonconstant
        }
    }
}

/// `I_g` or `M_g` between `F_p` and `F_q`: for `p != q` bounded iff `g = 0`;
/// for `p = q` bounded iff `g` is constant and compact iff `g = 0`.
pub fn ig_mg_verdict(
    operator: OperatorKind,
    kind: SymbolKind,
    p: Exponent,
    q: Exponent,
) -> Result<OperatorVerdict, CriteriaError> {
    if !matches!(operator, OperatorKind::Ig | OperatorKind::Mg) {
        return Err(CriteriaError::InvalidParameter(format!(
            "{operator} has no symbolic verdict"
        )));
    }
    let zero = kind == SymbolKind::Zero;
    let (bounded, reason) = if p != q {
        (zero, "p != q: bounded only for the zero symbol")
    } else {
        (
            zero || matches!(kind, SymbolKind::Constant(_)),
            "p = q: bounded exactly for constant symbols",
        )
    };
    Ok(OperatorVerdict {
        operator,
        p,
        q,
        bounded: Tri::from_bool(bounded),
        compact: Tri::from_bool(zero),
        evidence_kind: EvidenceKind::Symbolic,
        profile: None,
        integral: None,
        reason: Some(reason.into()),
    })
}

/// Norm ratios along a monomial test family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSequence {
    pub n: Vec<usize>,
    pub log_ratios: Vec<f64>,
    /// Ratios strictly increase over the second half of the range.
    pub monotone_tail: bool,
}

impl WitnessSequence {
    fn new(n: Vec<usize>, log_ratios: Vec<f64>) -> Self {
        let half = log_ratios.len() / 2;
        let monotone_tail = log_ratios.len() >= 2
            && log_ratios[half.min(log_ratios.len() - 2)..]
                .windows(2)
                .all(|w| w[1] > w[0]);
        WitnessSequence {
            n,
            log_ratios,
            monotone_tail,
        }
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.log_ratios.iter().map(|l| l.exp()).collect()
    }

    pub fn strictly_increasing(&self) -> bool {
        self.log_ratios.windows(2).all(|w| w[1] > w[0])
    }

    /// Profile of the log ratios against `n` (requires `n >= 1`).
    pub fn profile(&self) -> GrowthProfile {
        GrowthProfile::new(
            self.n.iter().map(|n| *n as f64).collect(),
            self.log_ratios.clone(),
        )
    }
}

fn check_range(n_range: &std::ops::RangeInclusive<usize>) -> Result<(), CriteriaError> {
    if n_range.is_empty() {
        return Err(CriteriaError::InvalidParameter("empty n range".into()));
    }
    Ok(())
}

/// `||M_g z^n|| / ||z^n||` over `n_range`.
pub fn mg_unboundedness_witness(
    g: &EntireFunction,
    w: &Weight,
    p: Exponent,
    n_range: std::ops::RangeInclusive<usize>,
) -> Result<WitnessSequence, CriteriaError> {
    check_range(&n_range)?;
    let ns: Vec<usize> = n_range.collect();
    let res = exec::map(&ns, |n| -> Result<f64, NormError> {
        let zn = EntireFunction::monomial(*n);
        let top = norm(&multiply(g, &zn), w, p)?;
        let bottom = norm(&zn, w, p)?;
        Ok(top.log_value - bottom.log_value)
    });
    let logs = res.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(WitnessSequence::new(ns, logs))
}

/// `||D z^n||_q / ||z^n||_p` over `n_range`.
pub fn d_unboundedness_witness(
    w: &Weight,
    p: Exponent,
    q: Exponent,
    n_range: std::ops::RangeInclusive<usize>,
) -> Result<WitnessSequence, CriteriaError> {
    check_range(&n_range)?;
    let ns: Vec<usize> = n_range.collect();
    let res = exec::map(&ns, |n| -> Result<f64, NormError> {
        let zn = EntireFunction::monomial(*n);
        let top = norm(&zn.derivative(), w, q)?;
        let bottom = norm(&zn, w, p)?;
        Ok(top.log_value - bottom.log_value)
    });
    let logs = res.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(WitnessSequence::new(ns, logs))
}

/// Profile over `n` of `ln(||z^n||_q / ||z^n||_p)`; exploratory, no verdict.
pub fn inclusion_ratio_diagnostic(
    w: &Weight,
    p: Exponent,
    q: Exponent,
    n_range: std::ops::RangeInclusive<usize>,
) -> Result<GrowthProfile, CriteriaError> {
    if *n_range.start() == 0 {
        return Err(CriteriaError::InvalidParameter("n range must start at 1".into()));
    }
    check_range(&n_range)?;
    let ns: Vec<usize> = n_range.collect();
    let res = exec::map(&ns, |n| -> Result<f64, NormError> {
        if p == q {
            return Ok(0.0);
        }
        let zn = EntireFunction::monomial(*n);
        Ok(norm(&zn, w, q)?.log_value - norm(&zn, w, p)?.log_value)
    });
    let logs = res.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(GrowthProfile::new(ns.iter().map(|n| *n as f64).collect(), logs))
}
