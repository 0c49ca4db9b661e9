//! Sampled log-profiles and their asymptotic classification.
//!
//! Suprema and limits over the whole plane are replaced by a profile sampled
//! on a geometric radius grid. The classification is a pure function of the
//! samples:
//!
//! * the tail slope is the least-squares slope of the log value against
//!   `ln r` over the last quarter of the samples;
//! * `Divergent` if the tail slope exceeds `+0.05`;
//! * `Vanishing` if it is below `-0.05` and the last value sits at least 2
//!   log-units under the first;
//! * `Bounded` if `|slope| <= 0.05` and the values over the last decade of
//!   radii oscillate by less than 1 log-unit;
//! * `Inconclusive` otherwise.

use serde::{Deserialize, Serialize};

use crate::numeric::ls_slope;

pub const SLOPE_DEAD_BAND: f64 = 0.05;
pub const VANISHING_DROP: f64 = 2.0;
pub const BOUNDED_OSCILLATION: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Vanishing,
    Bounded,
    Divergent,
    Inconclusive,
}

impl Classification {
    /// `Vanishing` and `Bounded` both mean the supremum is finite.
    pub fn is_finite(self) -> bool {
        matches!(self, Classification::Vanishing | Classification::Bounded)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub radii: Vec<f64>,
    pub log_values: Vec<f64>,
    pub classification: Classification,
    pub tail_slope: f64,
}

impl GrowthProfile {
    /// Builds a profile and classifies it. `radii` must be strictly increasing
    /// and positive.
    pub fn new(radii: Vec<f64>, log_values: Vec<f64>) -> Self {
        assert_eq!(radii.len(), log_values.len());
        debug_assert!(radii.windows(2).all(|w| w[0] < w[1]));
        let (classification, tail_slope) = classify(&radii, &log_values);
        GrowthProfile {
            radii,
            log_values,
            classification,
            tail_slope,
        }
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.radii.last()?, *self.log_values.last()?))
    }

    /// Profile as CSV with header `r,log_value`.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["r", "log_value"])?;
        for (r, v) in self.radii.iter().zip(&self.log_values) {
            w.write_record([r.to_string(), v.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Classification rule; returns the class and the tail slope.
pub fn classify(radii: &[f64], log_values: &[f64]) -> (Classification, f64) {
    let n = radii.len();
    if n < 4 {
        return (Classification::Inconclusive, f64::NAN);
    }
    if log_values.iter().all(|v| *v == f64::NEG_INFINITY) {
        // identically zero quantity
        return (Classification::Vanishing, f64::NEG_INFINITY);
    }
    if log_values.iter().any(|v| v.is_nan()) {
        return (Classification::Inconclusive, f64::NAN);
    }
    let tail_len = (n / 4).max(3);
    let start = n - tail_len;
    let xs: Vec<f64> = radii[start..].iter().map(|r| r.ln()).collect();
    let ys = &log_values[start..];
    if ys.iter().any(|v| !v.is_finite()) {
        let last = log_values[n - 1];
        return if last == f64::INFINITY {
            (Classification::Divergent, f64::INFINITY)
        } else {
            (Classification::Inconclusive, f64::NAN)
        };
    }
    let slope = ls_slope(&xs, ys);
    let first = log_values[0];
    let last = log_values[n - 1];
    let class = if slope > SLOPE_DEAD_BAND {
        Classification::Divergent
    } else if slope < -SLOPE_DEAD_BAND {
        if last < first - VANISHING_DROP {
            Classification::Vanishing
        } else {
            Classification::Inconclusive
        }
    } else {
        let r_last = radii[n - 1];
        let decade: Vec<f64> = radii
            .iter()
            .zip(log_values)
            .filter(|(r, _)| **r >= r_last / 10.0)
            .map(|(_, v)| *v)
            .collect();
        let hi = decade.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = decade.iter().copied().fold(f64::INFINITY, f64::min);
        if hi - lo < BOUNDED_OSCILLATION {
            Classification::Bounded
        } else {
            Classification::Inconclusive
        }
    };
    (class, slope)
}

/// Geometric grid `r0 * ratio^k` up to and including the last point `<= cap`.
pub fn geometric_grid(r0: f64, ratio: f64, cap: f64) -> Vec<f64> {
    assert!(r0 > 0.0 && ratio > 1.0);
    let mut out = Vec::new();
    let mut k = 0i32;
    loop {
        let r = r0 * ratio.powi(k);
        if r > cap * (1.0 + 1e-12) {
            break;
        }
        out.push(r);
        k += 1;
    }
    out
}

/// Geometric grid with exactly `n` points from `a` to `b`.
pub fn geometric_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && a > 0.0 && b > a);
    let ratio = (b / a).ln() / (n - 1) as f64;
    (0..n).map(|i| a * (ratio * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_profile(slope: f64, offset: f64) -> GrowthProfile {
        let radii = geometric_grid(1.0, 1.15, 1000.0);
        let vals = radii.iter().map(|r| offset + slope * r.ln()).collect();
        GrowthProfile::new(radii, vals)
    }

    #[test]
    fn classifies_pure_powers() {
        assert_eq!(power_profile(1.0, 0.0).classification, Classification::Divergent);
        assert_eq!(power_profile(0.0, 3.0).classification, Classification::Bounded);
        assert_eq!(power_profile(-0.5, 0.0).classification, Classification::Vanishing);
        // too shallow to drop two units over three decades
        assert_eq!(
            power_profile(-0.2, 0.0).classification,
            Classification::Inconclusive
        );
    }

    #[test]
    fn bounded_requires_small_oscillation() {
        let radii = geometric_grid(1.0, 1.15, 1000.0);
        let vals: Vec<f64> = radii
            .iter()
            .map(|r| if (110.0..130.0).contains(r) { 1.5 } else { 0.0 })
            .collect();
        let (c, _) = classify(&radii, &vals);
        assert_eq!(c, Classification::Inconclusive);
    }

    #[test]
    fn grid_shapes() {
        let g = geometric_grid(1.0, 1.15, 1000.0);
        assert_eq!(g[0], 1.0);
        assert!(*g.last().unwrap() <= 1000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let p = geometric_points(1.0, 100.0, 3);
        assert!((p[1] - 10.0).abs() < 1e-12 && (p[2] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn csv_has_header() {
        let csv = power_profile(0.0, 1.0).to_csv().unwrap();
        assert!(csv.starts_with("r,log_value\n1,1\n"));
    }
}
