//! Log-domain radial quadrature.
//!
//! Integrands are handed over as their natural logarithm `L(r)`. A scan on a
//! fixed radius grid locates the peak and a truncation radius where `L` has
//! fallen `TAIL_DROP` units below its running maximum; composite
//! Gauss-Legendre panels between scan points are then bisected adaptively.
//! Panel values are computed on exponent-shifted samples `exp(L - L_max)`, so
//! integrands spanning thousands of orders of magnitude stay in range.

use std::sync::OnceLock;

use crate::exec;
use crate::numeric::ls_slope;

/// Natural-log drop that defines the truncation radius.
pub const TAIL_DROP: f64 = 92.0;
/// Gauss-Legendre order per panel.
pub const GL_ORDER: usize = 20;
/// Local relative change at which a panel is accepted.
pub const PANEL_RTOL: f64 = 1e-10;
/// Power-law tails decaying slower than `r^{-1.05}` are reported divergent.
pub const DIVERGENCE_SLOPE: f64 = -1.05;

const LINEAR_STEP: f64 = 0.05;
const LINEAR_END: f64 = 5.0;
const GEOMETRIC_RATIO: f64 = 1.01;
const SCAN_CHUNK: usize = 32;
const MAX_DEPTH: u32 = 40;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Fixed scan grid: linear steps near the origin, then geometric, ending at
/// `cap`.
pub fn scan_grid(cap: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let r = k as f64 * LINEAR_STEP;
        if r > LINEAR_END.min(cap) + 1e-12 {
            break;
        }
        out.push(r);
        k += 1;
    }
    let mut r = *out.last().unwrap();
    loop {
        r *= GEOMETRIC_RATIO;
        if r >= cap {
            break;
        }
        out.push(r);
    }
    if *out.last().unwrap() < cap {
        out.push(cap);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `L` dropped `TAIL_DROP` below its maximum before the cap.
    Decayed,
    /// Reached the cap with a power-law tail of this log-log slope (< -1.05).
    PowerLaw(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialIntegral {
    /// `ln int_0^{R*} exp(L(r)) dr`
    pub ln_value: f64,
    pub truncation_radius: f64,
    /// `ln` of the estimated mass beyond the truncation radius.
    pub tail_log_bound: f64,
    pub nodes_used: usize,
    pub tail: Tail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    pub cap: f64,
    pub slope: f64,
}

/// Integrates `exp(log_integrand(r))` over `[0, inf)` truncated as described
/// in the module docs. Returns `Err` when the integrand has not decayed at
/// `cap` and its log-log slope there is not below `DIVERGENCE_SLOPE`.
pub fn integrate_radial<F>(log_integrand: F, cap: f64) -> Result<RadialIntegral, Divergence>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let grid = scan_grid(cap);
    let mut values: Vec<f64> = Vec::with_capacity(grid.len());
    let mut l_max = f64::NEG_INFINITY;
    let mut arg_max = 0usize;
    let mut cut: Option<usize> = None;
    'scan: for chunk in grid.chunks(SCAN_CHUNK) {
        let vals = exec::map(chunk, |r| log_integrand(*r));
        for v in vals {
            let i = values.len();
            values.push(v);
            if v > l_max {
                l_max = v;
                arg_max = i;
            }
            if l_max > f64::NEG_INFINITY && i > arg_max && v < l_max - TAIL_DROP {
                cut = Some(i);
                break 'scan;
            }
        }
    }
    let mut nodes_used = values.len();
    if l_max == f64::NEG_INFINITY {
        return Ok(RadialIntegral {
            ln_value: f64::NEG_INFINITY,
            truncation_radius: 0.0,
            tail_log_bound: f64::NEG_INFINITY,
            nodes_used,
            tail: Tail::Decayed,
        });
    }
    if l_max.is_nan() || l_max == f64::INFINITY {
        return Err(Divergence {
            cap,
            slope: f64::INFINITY,
        });
    }
    let (end, tail, tail_log_bound) = match cut {
        Some(i) => {
            let (r0, r1) = (grid[i - 1], grid[i]);
            let d = ((values[i] - values[i - 1]) / (r1 - r0)).abs().max(1e-300);
            (i, Tail::Decayed, values[i] - d.ln())
        }
        None => {
            let n = values.len();
            let lo = grid.partition_point(|r| *r < cap / 1.2).min(n.saturating_sub(3));
            let xs: Vec<f64> = grid[lo..n].iter().map(|r| r.ln()).collect();
            let slope = ls_slope(&xs, &values[lo..n]);
            if !(slope < DIVERGENCE_SLOPE) || values[n - 1] >= values[n - 2] {
                return Err(Divergence { cap, slope });
            }
            let tail = values[n - 1] + cap.ln() - (-slope - 1.0).ln();
            (n - 1, Tail::PowerLaw(slope), tail)
        }
    };

    let shift = l_max;
    let f = |r: f64| {
        let v = log_integrand(r);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            (v - shift).exp()
        }
    };
    let mut panels: Vec<Panel> = exec::map_range(end, |i| {
        let (a, b) = (grid[i], grid[i + 1]);
        Panel::new(a, b, gl(&f, a, b), 0)
    });
    nodes_used += panels.len() * GL_ORDER;
    loop {
        let refined = exec::map(&panels, |p| p.refine(&f));
        nodes_used += refined.iter().filter(|r| r.is_some()).count() * 2 * GL_ORDER;
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let mut next = Vec::with_capacity(panels.len());
        let mut changed = false;
        for (p, r) in panels.iter().zip(refined) {
            match r {
                Some((left, right)) => {
                    let halves = left.value + right.value;
                    let err = (halves - p.value).abs();
                    if err <= PANEL_RTOL * halves.abs()
                        || err <= 1e-16 * total
                        || p.depth >= MAX_DEPTH
                    {
                        next.push(Panel {
                            value: halves,
                            done: true,
                            ..*p
                        });
                    } else {
                        changed = true;
                        next.push(left);
                        next.push(right);
                    }
                }
                None => next.push(*p),
            }
        }
        panels = next;
        if !changed {
            break;
        }
    }
    let sum: f64 = panels.iter().map(|p| p.value).sum();
    Ok(RadialIntegral {
        ln_value: shift + sum.ln(),
        truncation_radius: grid[end],
        tail_log_bound,
        nodes_used,
        tail,
    })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    depth: u32,
    done: bool,
}

impl Panel {
    fn new(a: f64, b: f64, value: f64, depth: u32) -> Self {
        Panel {
            a,
            b,
            value,
            depth,
            done: false,
        }
    }

    fn refine<F: Fn(f64) -> f64>(&self, f: &F) -> Option<(Panel, Panel)> {
        if self.done {
            return None;
        }
        let m = 0.5 * (self.a + self.b);
        Some((
            Panel::new(self.a, m, gl(f, self.a, m), self.depth + 1),
            Panel::new(m, self.b, gl(f, m, self.b), self.depth + 1),
        ))
    }
}

fn gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = gl_rule();
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    h * x.iter().zip(w).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
}

/// Composite Gauss-Legendre of `f` on `[a, b]` with `panels` equal panels.
pub fn gl_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| gl(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((i - 2.0 / 39.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn gaussian_integral() {
        // int_0^inf e^{-r^2} 2 pi r dr = pi
        let res = integrate_radial(|r| -r * r + (2.0 * std::f64::consts::PI * r).ln(), 50.0)
            .unwrap();
        assert!((res.ln_value - std::f64::consts::PI.ln()).abs() < 1e-13);
        assert_eq!(res.tail, Tail::Decayed);
        assert!(res.truncation_radius < 11.0);
    }

    #[test]
    fn power_tails() {
        // int_0^inf r/(1+r)^4 dr = 1/6, truncated at 1000 with tail ~ 1/(2e6)
        let res = integrate_radial(|r| r.ln() - 4.0 * (1.0 + r).ln(), 1000.0).unwrap();
        assert!(matches!(res.tail, Tail::PowerLaw(s) if (s + 3.0).abs() < 0.01));
        assert!((res.ln_value.exp() - 1.0 / 6.0).abs() < 1e-6);
        assert!((res.tail_log_bound - (0.5e-6f64).ln()).abs() < 0.05);
        let err = integrate_radial(|r| r.ln() - 2.0 * (1.0 + r).ln(), 1000.0).unwrap_err();
        assert!((err.slope + 1.0).abs() < 0.01);
    }

    #[test]
    fn zero_integrand() {
        let res = integrate_radial(|_| f64::NEG_INFINITY, 50.0).unwrap();
        assert_eq!(res.ln_value, f64::NEG_INFINITY);
    }

    #[test]
    fn huge_dynamic_range() {
        // e^{2000} times a half-line Gaussian
        let res = integrate_radial(|r| 2000.0 - r * r, 50.0).unwrap();
        let want = 2000.0 + (std::f64::consts::PI.sqrt() / 2.0).ln();
        assert!((res.ln_value - want).abs() < 1e-12);
    }
}
