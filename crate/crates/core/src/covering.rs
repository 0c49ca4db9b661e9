//! Separated coverings of a disk by `t`-disks with finite overlap.
//!
//! Centers are chosen greedily from a uniform candidate grid of spacing
//! `min t / 8`, scanned in order of `(|z|, arg z)`; a candidate is accepted
//! when it lies outside every accepted disk and no accepted center lies
//! inside its own disk. A bucket grid with cell size `max t` keeps the
//! neighbour search local.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::weights::{Weight, WeightError};

/// Default cap on the number of candidate points.
pub const DEFAULT_CANDIDATE_BUDGET: usize = 10_000_000;
/// Candidate spacing is `min t / CANDIDATE_DENSITY`.
pub const CANDIDATE_DENSITY: f64 = 8.0;
pub const LIPSCHITZ_MARGIN: f64 = 0.1;
/// Number of gap-filling passes on grids of spacing `h / 2^k`.
pub const REFINE_LEVELS: u32 = 2;
const SCALE_SAMPLES: usize = 10_000;

#[derive(Debug, Error)]
pub enum CoveringError {
    #[error("{candidates} candidate points exceed the budget of {budget}")]
    RegionTooLarge { candidates: u128, budget: usize },
    #[error("region radius must be positive, got {0}")]
    InvalidRegion(f64),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// A radial radius function `t(|z|)`.
pub trait RadialScale: Sync {
    fn t(&self, r: f64) -> f64;

    /// Minimum and maximum of `t` on `[0, radius]` (sampled).
    fn extremes(&self, radius: f64) -> (f64, f64) {
        let n = SCALE_SAMPLES;
        (0..=n)
            .map(|i| self.t(radius * i as f64 / n as f64))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), t| (lo.min(t), hi.max(t)))
    }
}

/// `t = s * tau`.
#[derive(Debug, Clone)]
pub struct ScaledTau<'a> {
    pub weight: &'a Weight,
    pub scale: f64,
}

impl RadialScale for ScaledTau<'_> {
    fn t(&self, r: f64) -> f64 {
        self.scale * self.weight.tau(r).unwrap_or(0.0)
    }
}

/// `t` identically equal to a constant.
#[derive(Debug, Clone, Copy)]
pub struct ConstantRadius(pub f64);

impl RadialScale for ConstantRadius {
    fn t(&self, _r: f64) -> f64 {
        self.0
    }
}

/// Largest `|tau'|` on a uniform grid of `[0, radius]`.
pub fn max_abs_tau_prime(w: &Weight, radius: f64) -> Result<f64, WeightError> {
    let mut l = 0.0f64;
    for i in 0..=SCALE_SAMPLES {
        let r = radius * i as f64 / SCALE_SAMPLES as f64;
        l = l.max(w.tau_prime(r)?.abs());
    }
    Ok(l)
}

/// `s = min(1, 1 / (4 L (1 + margin)))` with `L = max |tau'|` on the region,
/// so that `s tau` is `1/4`-Lipschitz there.
pub fn lipschitz_scale(w: &Weight, region_radius: f64) -> Result<f64, WeightError> {
    let l = max_abs_tau_prime(w, region_radius)?;
    if l == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 / (4.0 * l * (1.0 + LIPSCHITZ_MARGIN))).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringLattice {
    pub centers: Vec<Complex64>,
    pub radii: Vec<f64>,
    pub region_radius: f64,
    /// Largest number of tripled disks over the multiplicity probes.
    pub n_max: usize,
    /// `t = scale * tau` (1 for a constant radius function).
    pub scale: f64,
}

impl CoveringLattice {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// CSV with header `x,y,t`.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "y", "t"])?;
        for (z, t) in self.centers.iter().zip(&self.radii) {
            w.write_record([z.re.to_string(), z.im.to_string(), t.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Drops center `i` (for forced-failure checks).
    pub fn without(&self, i: usize) -> CoveringLattice {
        let mut out = self.clone();
        out.centers.remove(i);
        out.radii.remove(i);
        out
    }

    /// Duplicates center `i` (for forced-failure checks).
    pub fn with_duplicate(&self, i: usize) -> CoveringLattice {
        let mut out = self.clone();
        out.centers.push(self.centers[i]);
        out.radii.push(self.radii[i]);
        out
    }
}

/// Uniform bucket grid over `[-extent, extent]^2`.
struct Buckets {
    cell: f64,
    extent: f64,
    side: usize,
    cells: Vec<Vec<u32>>,
}

impl Buckets {
    fn new(extent: f64, cell: f64) -> Self {
        let side = ((2.0 * extent / cell).ceil() as usize).max(1) + 1;
        Buckets {
            cell,
            extent,
            side,
            cells: vec![Vec::new(); side * side],
        }
    }

    fn coords(&self, z: Complex64) -> (usize, usize) {
        let f = |x: f64| (((x + self.extent) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        (f(z.re), f(z.im))
    }

    fn insert(&mut self, z: Complex64, id: u32) {
        let (i, j) = self.coords(z);
        self.cells[j * self.side + i].push(id);
    }

    /// Ids in all cells meeting the square of half-side `radius` about `z`.
    fn near(&self, z: Complex64, radius: f64) -> impl Iterator<Item = u32> + '_ {
        let reach = (radius / self.cell).ceil() as usize;
        let (i, j) = self.coords(z);
        let i0 = i.saturating_sub(reach);
        let j0 = j.saturating_sub(reach);
        let i1 = (i + reach).min(self.side - 1);
        let j1 = (j + reach).min(self.side - 1);
        (j0..=j1).flat_map(move |jj| {
            (i0..=i1).flat_map(move |ii| self.cells[jj * self.side + ii].iter().copied())
        })
    }
}

/// Per radial bin, how far a neighbour search has to reach so that every disk
/// `D(z_j, m t_j)` meeting a point of the bin has its center within reach.
struct RadialMax {
    bin: f64,
    reach: Vec<f64>,
}

impl RadialMax {
    fn from_maxima(max: Vec<f64>, bin: f64, m: f64) -> Self {
        let n = max.len();
        let reach = (0..n)
            .map(|k| {
                (0..n)
                    .filter_map(|j| {
                        let gap = (j.abs_diff(k).saturating_sub(1)) as f64 * bin;
                        let r = m * max[j];
                        (r > gap).then_some(r)
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        RadialMax { bin, reach }
    }

    fn from_scale(t: &dyn RadialScale, extent: f64, bin: f64, m: f64) -> Self {
        let n = (extent / bin).ceil() as usize + 1;
        let max = (0..n)
            .map(|k| {
                (0..=4)
                    .map(|i| t.t((k as f64 + i as f64 / 4.0) * bin))
                    .fold(0.0, f64::max)
                    * 1.1
            })
            .collect();
        Self::from_maxima(max, bin, m)
    }

    fn from_lattice(lat: &CoveringLattice, bin: f64, m: f64) -> Self {
        let extent = lat.centers.iter().map(|z| z.norm()).fold(lat.region_radius, f64::max);
        let mut max = vec![0.0f64; (extent / bin).ceil() as usize + 2];
        for (z, t) in lat.centers.iter().zip(&lat.radii) {
            let k = (z.norm() / bin) as usize;
            max[k] = max[k].max(*t);
        }
        Self::from_maxima(max, bin, m)
    }

    fn reach(&self, r: f64) -> f64 {
        self.reach[((r.max(0.0) / self.bin) as usize).min(self.reach.len() - 1)]
    }
}

/// Number of points `(i h, j h)` with `|.| <= radius`.
fn grid_count(radius: f64, h: f64) -> u128 {
    let n = (radius / h).floor() as i64;
    (-n..=n)
        .map(|i| {
            let y = (radius * radius - (i as f64 * h).powi(2)).max(0.0).sqrt();
            2 * (y / h).floor() as u128 + 1
        })
        .sum()
}

/// Candidate grid `(i h + offset, j h + offset)` inside the disk, filtered
/// and sorted by `(|z|, arg z)` with `arg` in `[0, 2 pi)`.
fn grid_points<F>(radius: f64, h: f64, offset: f64, keep: F) -> Vec<(f64, f64, Complex64)>
where
    F: Fn(Complex64) -> bool + Sync + Send,
{
    let n = (radius / h).ceil() as i64;
    let rows = exec::map_range((2 * n + 1) as usize, |row| {
        let y = (row as i64 - n) as f64 * h + offset;
        let mut out = Vec::new();
        for i in -n..=n {
            let z = Complex64::new(i as f64 * h + offset, y);
            let r = z.norm();
            if r <= radius && keep(z) {
                let a = if r == 0.0 { 0.0 } else { z.im.atan2(z.re).rem_euclid(TAU) };
                out.push((r, a, z));
            }
        }
        out
    });
    let mut pts: Vec<_> = rows.into_iter().flatten().collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    pts
}

struct Greedy<'a> {
    t: &'a dyn RadialScale,
    local: RadialMax,
    buckets: Buckets,
    centers: Vec<Complex64>,
    radii: Vec<f64>,
}

impl Greedy<'_> {
    fn covers(&self, c: Complex64) -> bool {
        self.buckets
            .near(c, self.local.reach(c.norm()))
            .any(|id| (c - self.centers[id as usize]).norm() < self.radii[id as usize])
    }

    /// Accepts `c` when it lies outside every accepted disk and no accepted
    /// center lies inside `D(c, t(c))`.
    fn offer(&mut self, c: Complex64, r: f64) -> bool {
        let tc = self.t.t(r);
        let blocked = self
            .buckets
            .near(c, self.local.reach(r).max(tc))
            .any(|id| {
                let d = (c - self.centers[id as usize]).norm();
                d < self.radii[id as usize] || d < tc
            });
        if !blocked {
            self.buckets.insert(c, self.centers.len() as u32);
            self.centers.push(c);
            self.radii.push(tc);
        }
        !blocked
    }
}

/// Greedy lattice for `t = s tau`, `s = lipschitz_scale(w, region_radius)`.
pub fn generate_covering(w: &Weight, region_radius: f64) -> Result<CoveringLattice, CoveringError> {
    let s = lipschitz_scale(w, region_radius)?;
    let scale = ScaledTau { weight: w, scale: s };
    generate_covering_with(&scale, s, region_radius, DEFAULT_CANDIDATE_BUDGET)
}

pub fn generate_covering_with(
    t: &dyn RadialScale,
    scale: f64,
    region_radius: f64,
    budget: usize,
) -> Result<CoveringLattice, CoveringError> {
    if !(region_radius > 0.0) {
        return Err(CoveringError::InvalidRegion(region_radius));
    }
    let (t_min, t_max) = t.extremes(region_radius);
    let h = t_min / CANDIDATE_DENSITY;
    let count = grid_count(region_radius, h);
    if count > budget as u128 {
        return Err(CoveringError::RegionTooLarge {
            candidates: count,
            budget,
        });
    }
    let cell = (2.0 * t_min).max(2.0 * region_radius / 2048.0);
    let mut greedy = Greedy {
        t,
        local: RadialMax::from_scale(t, region_radius + t_max, cell, 1.0),
        buckets: Buckets::new(region_radius + t_max, cell),
        centers: Vec::new(),
        radii: Vec::new(),
    };
    let base = grid_points(region_radius, h, 0.0, |_| true);
    for (r, _, c) in base {
        greedy.offer(c, r);
    }
    // Gaps narrower than the candidate spacing survive the first pass; offer
    // the uncovered points of successively finer, staggered grids.
    for level in 1..=REFINE_LEVELS {
        let hl = h / f64::from(1u32 << level);
        let gaps = grid_points(region_radius, hl, 0.5 * hl, |c| !greedy.covers(c));
        for (r, _, c) in gaps {
            greedy.offer(c, r);
        }
    }
    let Greedy { centers, radii, .. } = greedy;
    let mut lattice = CoveringLattice {
        centers,
        radii,
        region_radius,
        n_max: 0,
        scale,
    };
    let cell = (2.0 * t_min).max(2.0 * region_radius / 2048.0);
    lattice.n_max = probe_grid(&lattice, t_min / 10.0, t_max, cell).max_multiplicity;
    Ok(lattice)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub centers: usize,
    pub separation_violations: usize,
    pub coverage_probes: usize,
    pub coverage_failures: usize,
    pub containment_samples: usize,
    pub containment_failures: usize,
    pub n_max: usize,
    pub separation: bool,
    pub coverage: bool,
    pub containment: bool,
    pub multiplicity_finite: bool,
}

impl CoveringReport {
    pub fn all_ok(&self) -> bool {
        self.separation && self.coverage && self.containment && self.multiplicity_finite
    }
}

struct ProbeStats {
    probes: usize,
    uncovered: usize,
    max_multiplicity: usize,
}

/// Probes on a grid offset by half a step. Coverage is only counted at
/// interior probes (`|p| <= R - max t`); multiplicity of tripled disks at all
/// probes.
fn probe_grid(lat: &CoveringLattice, spacing: f64, t_max: f64, cell: f64) -> ProbeStats {
    let big = lat.radii.iter().copied().fold(0.0, f64::max).max(t_max);
    let local = RadialMax::from_lattice(lat, cell, 3.0);
    let local = &local;
    let mut buckets = Buckets::new(lat.region_radius + 3.0 * big, cell);
    for (k, z) in lat.centers.iter().enumerate() {
        buckets.insert(*z, k as u32);
    }
    let buckets = &buckets;
    let rr = lat.region_radius;
    let interior = rr - t_max;
    let n = (rr / spacing).ceil() as i64;
    let rows = exec::map_range((2 * n + 1) as usize, |row| {
        let y = (row as i64 - n) as f64 * spacing + 0.5 * spacing;
        let mut st = ProbeStats {
            probes: 0,
            uncovered: 0,
            max_multiplicity: 0,
        };
        if y.abs() > rr {
            return st;
        }
        for i in -n..=n {
            let p = Complex64::new(i as f64 * spacing + 0.5 * spacing, y);
            let r = p.norm();
            if r > rr {
                continue;
            }
            let mut covered = false;
            let mut mult = 0;
            for id in buckets.near(p, local.reach(r)) {
                let d = (p - lat.centers[id as usize]).norm();
                let t = lat.radii[id as usize];
                if d < t {
                    covered = true;
                }
                if d < 3.0 * t {
                    mult += 1;
                }
            }
            st.max_multiplicity = st.max_multiplicity.max(mult);
            if r <= interior {
                st.probes += 1;
                if !covered {
                    st.uncovered += 1;
                }
            }
        }
        st
    });
    rows.into_iter().fold(
        ProbeStats {
            probes: 0,
            uncovered: 0,
            max_multiplicity: 0,
        },
        |a, b| ProbeStats {
            probes: a.probes + b.probes,
            uncovered: a.uncovered + b.uncovered,
            max_multiplicity: a.max_multiplicity.max(b.max_multiplicity),
        },
    )
}

/// Checks separation exactly, coverage and multiplicity on a probe grid of
/// the given spacing, and the inclusion `D(z, t(z)) in D(z_j, 3 t_j)` for
/// sampled `z` in each `D(z_j, t_j)`.
pub fn verify_covering(lat: &CoveringLattice, t: &dyn RadialScale, probe_spacing: f64) -> CoveringReport {
    let (t_min, t_max) = t.extremes(lat.region_radius);
    let big = lat.radii.iter().copied().fold(0.0, f64::max).max(t_max);
    let cell = (2.0 * t_min).max(2.0 * lat.region_radius / 2048.0);
    let mut buckets = Buckets::new(lat.region_radius + big, cell);
    for (k, z) in lat.centers.iter().enumerate() {
        buckets.insert(*z, k as u32);
    }
    let buckets = &buckets;
    let separation_violations: usize = exec::map_range(lat.len(), |k| {
        buckets
            .near(lat.centers[k], lat.radii[k])
            .filter(|id| {
                let j = *id as usize;
                j != k && (lat.centers[j] - lat.centers[k]).norm() < lat.radii[k]
            })
            .count()
    })
    .into_iter()
    .sum();

    const RINGS: [f64; 3] = [0.0, 0.5, 0.999];
    const SPOKES: usize = 16;
    let containment: Vec<(usize, usize)> = exec::map_range(lat.len(), |k| {
        let (c, tk) = (lat.centers[k], lat.radii[k]);
        let mut samples = 0;
        let mut failures = 0;
        for rho in RINGS {
            let spokes = if rho == 0.0 { 1 } else { SPOKES };
            for a in 0..spokes {
                let z = c + Complex64::from_polar(rho * tk, TAU * a as f64 / spokes as f64);
                samples += 1;
                if (z - c).norm() + t.t(z.norm()) > 3.0 * tk * (1.0 + 1e-12) {
                    failures += 1;
                }
            }
        }
        (samples, failures)
    });
    let containment_samples = containment.iter().map(|x| x.0).sum();
    let containment_failures = containment.iter().map(|x| x.1).sum();

    let probes = probe_grid(lat, probe_spacing, t_max, cell);
    CoveringReport {
        centers: lat.len(),
        separation_violations,
        coverage_probes: probes.probes,
        coverage_failures: probes.uncovered,
        containment_samples,
        containment_failures,
        n_max: probes.max_multiplicity,
        separation: separation_violations == 0,
        coverage: probes.uncovered == 0,
        containment: containment_failures == 0,
        multiplicity_finite: probes.max_multiplicity > 0,
    }
}
