use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::MetricSystem;
use crate::error::{Error, Result};
use crate::symbolic::SymbolicSystem;
use crate::torus::{SuCoords, ToralSystem, TorusPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    ExactSymbolic,
    GreedyUpper,
    PackingLower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub eps: f64,
    /// Decimal representation; exact for symbolic counts.
    pub count: String,
    pub ln_count: f64,
}

impl CoverEntry {
    pub fn from_big(eps: f64, count: &BigUint) -> Self {
        Self { eps, count: count.to_string(), ln_count: ln_big(count) }
    }

    pub fn from_usize(eps: f64, count: usize) -> Self {
        Self { eps, count: count.to_string(), ln_count: (count as f64).ln() }
    }
}

/// Covering numbers across scales, all obtained by one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub method: CoverMethod,
    pub entries: Vec<CoverEntry>,
}

impl CoverReport {
    /// Counts never increase as `ε` grows.
    pub fn is_monotone(&self) -> bool {
        let mut sorted: Vec<&CoverEntry> = self.entries.iter().collect();
        sorted.sort_by(|a, b| a.eps.total_cmp(&b.eps));
        sorted.windows(2).all(|w| w[1].ln_count <= w[0].ln_count + 1e-12)
    }
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let v: f64 = x.to_string().parse().unwrap_or(f64::INFINITY);
        if v.is_finite() {
            return v.ln();
        }
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let v: f64 = top.to_string().parse().unwrap();
    v.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact symbolic covering number.
pub fn cov_eps_symbolic(sys: &SymbolicSystem, eps: f64) -> Result<CoverEntry> {
    Ok(CoverEntry::from_big(eps, &sys.exact_cov(eps)?))
}

pub fn symbolic_cover_report(sys: &SymbolicSystem, scales: &[f64]) -> Result<CoverReport> {
    let entries = scales.iter().map(|&e| cov_eps_symbolic(sys, e)).collect::<Result<Vec<_>>>()?;
    Ok(CoverReport { method: CoverMethod::ExactSymbolic, entries })
}

/// A regular `side × side` grid on the torus together with its density:
/// every torus point is within `density` of a grid point in the metric `ρ`.
#[derive(Debug, Clone)]
pub struct GridSample {
    pub side: usize,
    pub spacing: f64,
    pub density: f64,
    pub points: Vec<TorusPoint>,
}

impl GridSample {
    pub fn with_side(sys: &ToralSystem, side: usize) -> Self {
        let h = 1.0 / side as f64;
        let points = (0..side * side)
            .map(|k| TorusPoint::new((k / side) as f64 * h, (k % side) as f64 * h))
            .collect();
        // ρ of a vector is maximised over a box at a corner
        let density = sys.rho([h / 2.0, h / 2.0]).max(sys.rho([h / 2.0, -h / 2.0]));
        Self { side, spacing: h, density, points }
    }

    /// Smallest grid whose density does not exceed `delta`.
    pub fn with_density(sys: &ToralSystem, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument("grid density must be positive".into()));
        }
        let unit = sys.rho([0.5, 0.5]).max(sys.rho([0.5, -0.5]));
        let (es, eu) = sys.exponents();
        // ρ(h·v) ≤ h^min(e) ρ(v) for h ≤ 1
        let mut side = (unit / delta).powf(1.0 / es.min(eu)).ceil().max(1.0) as usize;
        loop {
            let g = Self::with_side(sys, side);
            if g.density <= delta {
                return Ok(g);
            }
            side = side * 11 / 10 + 1;
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Euclidean radius containing every `ρ`-ball of radius `r`.
pub(crate) fn euclid_reach(sys: &ToralSystem, r: f64) -> f64 {
    let (es, eu) = sys.exponents();
    let s = r.powf(1.0 / es);
    let u = r.powf(1.0 / eu);
    let v = sys.from_su(SuCoords { s, u });
    let w = sys.from_su(SuCoords { s, u: -u });
    v[0].hypot(v[1]).max(w[0].hypot(w[1]))
}

/// Bucket grid over the unit square with cells at least `reach` wide.
struct SpatialHash {
    cells: usize,
    buckets: Vec<Vec<usize>>,
}

impl SpatialHash {
    fn new(points: &[TorusPoint], reach: f64) -> Self {
        let cells = ((1.0 / reach).floor() as usize).clamp(1, 4096);
        let mut buckets = vec![Vec::new(); cells * cells];
        for (i, p) in points.iter().enumerate() {
            buckets[Self::cell_of(cells, p)].push(i);
        }
        Self { cells, buckets }
    }

    fn cell_of(cells: usize, p: &TorusPoint) -> usize {
        let c = p.coords();
        let ix = ((c[0] * cells as f64) as usize).min(cells - 1);
        let iy = ((c[1] * cells as f64) as usize).min(cells - 1);
        ix * cells + iy
    }

    fn neighbours(&self, p: &TorusPoint) -> Vec<usize> {
        let c = Self::cell_of(self.cells, p);
        let (ix, iy) = ((c / self.cells) as i64, (c % self.cells) as i64);
        let n = self.cells as i64;
        let mut out: Vec<usize> = Vec::with_capacity(9);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let cell = ((ix + dx).rem_euclid(n) * n + (iy + dy).rem_euclid(n)) as usize;
                if !out.contains(&cell) {
                    out.push(cell);
                }
            }
        }
        out
    }
}

/// Greedy cover: the lowest-index uncovered point becomes a centre and
/// claims every point within `radius` of it. Returns the number of centres.
pub fn greedy_cover<D>(points: &[TorusPoint], dist: D, radius: f64, reach: f64) -> usize
where
    D: Fn(&TorusPoint, &TorusPoint) -> f64,
{
    let hash = SpatialHash::new(points, reach);
    let mut covered = vec![false; points.len()];
    let mut centres = 0;
    for i in 0..points.len() {
        if covered[i] {
            continue;
        }
        centres += 1;
        for cell in hash.neighbours(&points[i]) {
            for &j in &hash.buckets[cell] {
                if !covered[j] && dist(&points[i], &points[j]) <= radius {
                    covered[j] = true;
                }
            }
        }
        covered[i] = true;
    }
    centres
}

/// Size of a maximal `eps`-separated subset chosen greedily in index order.
pub fn packing_count<D>(points: &[TorusPoint], dist: D, eps: f64, reach: f64) -> usize
where
    D: Fn(&TorusPoint, &TorusPoint) -> f64,
{
    let hash = SpatialHash::new(points, reach);
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); hash.buckets.len()];
    let mut count = 0;
    for (i, p) in points.iter().enumerate() {
        let near = hash.neighbours(p);
        let separated = near.iter().all(|&cell| chosen[cell].iter().all(|&j| dist(p, &points[j]) >= eps));
        if separated {
            chosen[SpatialHash::cell_of(hash.cells, p)].push(i);
            count += 1;
        }
    }
    count
}

/// Greedy upper and packing lower bounds for one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverBounds {
    pub eps: f64,
    pub greedy_upper: usize,
    pub packing_lower: usize,
    pub density: f64,
    pub sample_size: usize,
}

/// `cov_ε` of the torus bracketed by a greedy cover (sets of diameter
/// `≤ 2(ε/2 − δ − η) + 2δ < ε`) and an `ε`-separated packing.
pub fn cov_eps_sample(sys: &ToralSystem, sample: &GridSample, eps: f64) -> Result<CoverBounds> {
    if !(eps > 0.0) {
        return Err(Error::ScaleOutOfRange(format!("epsilon must be positive, got {eps}")));
    }
    if sample.density > eps / 4.0 {
        return Err(Error::SampleTooSparse { density: sample.density, limit: eps / 4.0 });
    }
    if eps > sys.diameter() {
        return Ok(CoverBounds { eps, greedy_upper: 1, packing_lower: 1, density: sample.density, sample_size: sample.len() });
    }
    let radius = eps / 2.0 - sample.density - 1e-12 * eps;
    let dist = |a: &TorusPoint, b: &TorusPoint| sys.distance(a, b);
    let greedy_upper = greedy_cover(&sample.points, dist, radius, euclid_reach(sys, radius));
    let packing_lower = packing_count(&sample.points, dist, eps, euclid_reach(sys, eps));
    Ok(CoverBounds { eps, greedy_upper, packing_lower, density: sample.density, sample_size: sample.len() })
}

/// Bounds at each scale on a grid of density `eps / 6` built per scale.
/// Scales are evaluated in parallel; output order follows `scales`.
pub fn toral_cover_bounds(sys: &ToralSystem, scales: &[f64]) -> Result<Vec<CoverBounds>> {
    scales
        .par_iter()
        .map(|&eps| {
            let grid = GridSample::with_density(sys, eps / 6.0)?;
            cov_eps_sample(sys, &grid, eps)
        })
        .collect()
}

pub fn toral_cover_reports(bounds: &[CoverBounds]) -> (CoverReport, CoverReport) {
    let greedy = bounds.iter().map(|b| CoverEntry::from_usize(b.eps, b.greedy_upper)).collect();
    let packing = bounds.iter().map(|b| CoverEntry::from_usize(b.eps, b.packing_lower)).collect();
    (
        CoverReport { method: CoverMethod::GreedyUpper, entries: greedy },
        CoverReport { method: CoverMethod::PackingLower, entries: packing },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_big_matches_float() {
        let x = BigUint::from(2u32).pow(2000);
        assert!((ln_big(&x) - 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_big(&BigUint::from(13u32)) - 13f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn refuses_sparse_samples() {
        let t = ToralSystem::cat_map();
        let g = GridSample::with_side(&t, 20);
        assert!(matches!(cov_eps_sample(&t, &g, 0.01), Err(Error::SampleTooSparse { .. })));
    }

    #[test]
    fn huge_eps_gives_one() {
        let t = ToralSystem::cat_map();
        let g = GridSample::with_side(&t, 20);
        let b = cov_eps_sample(&t, &g, 10.0).unwrap();
        assert_eq!((b.greedy_upper, b.packing_lower), (1, 1));
    }

    #[test]
    fn greedy_dominates_packing() {
        let t = ToralSystem::cat_map();
        let g = GridSample::with_density(&t, 0.2 / 6.0).unwrap();
        let b = cov_eps_sample(&t, &g, 0.2).unwrap();
        assert!(b.packing_lower <= b.greedy_upper);
        assert!(b.packing_lower >= 1);
    }
}
