use std::ops::RangeInclusive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plaque::{hausdorff_estimate, Plaque};
use crate::dimension::LineFit;
use crate::dynamics::ProductStructure;
use crate::error::{Error, Result};
use crate::symbolic::{BiSequence, Cylinder, SymbolicSystem};
use crate::torus::{SuCoords, ToralSystem};

/// `μ(P^s × P^u) = μ^d(P^s)·μ^d(P^u)`, plus the same product recomputed on
/// holonomy-translated plaques.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxMeasure {
    pub stable: f64,
    pub unstable: f64,
    pub product: f64,
    pub holonomy_product: f64,
    pub holonomy_gap: f64,
}

impl BoxMeasure {
    fn zero() -> Self {
        Self { stable: 0.0, unstable: 0.0, product: 0.0, holonomy_product: 0.0, holonomy_gap: 0.0 }
    }
}

/// A point of the cylinder; outside the word the symbols are random
/// admissible continuations drawn from `seed`.
pub fn point_in_cylinder(sys: &SymbolicSystem, c: &Cylinder, seed: u64) -> Result<BiSequence> {
    if !c.admissible {
        return Err(Error::Inadmissible);
    }
    let first = c.word[0];
    let last = *c.word.last().unwrap();
    let raw = BiSequence::new(vec![first], c.word.clone(), c.start, vec![last])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(raw.resample_outside(sys.matrix(), Some(c.start), Some(c.last_index()), false, &mut rng))
}

/// Measure of the box `[W^s_p(x), W^u_q(x)]` equal to the cylinder on
/// `[−p, q]`. The cylinder must contain index 0; inadmissible words have
/// measure zero.
pub fn box_measure(sys: &SymbolicSystem, c: &Cylinder, d: f64, depth: u32) -> Result<BoxMeasure> {
    if c.start > 0 || c.last_index() < 0 {
        return Err(Error::Precondition(format!("box cylinder [{}, {}] must contain index 0", c.start, c.last_index())));
    }
    if !c.admissible {
        return Ok(BoxMeasure::zero());
    }
    let (p, q) = (-c.start, c.last_index());
    let x = point_in_cylinder(sys, c, 0)?;
    let stable = hausdorff_estimate(sys, &Plaque::stable(x.clone(), p), d, depth)?.root;
    let unstable = hausdorff_estimate(sys, &Plaque::unstable(x.clone(), q), d, depth)?.root;
    let product = stable * unstable;

    // another point of the box; slide the plaques of x along the product structure
    let y = point_in_cylinder(sys, c, 1)?;
    let on_stable = sys.bracket(&x, &y)?;
    let on_unstable = sys.bracket(&y, &x)?;
    let moved_u = hausdorff_estimate(sys, &Plaque::unstable(on_stable, q), d, depth)?.root;
    let moved_s = hausdorff_estimate(sys, &Plaque::stable(on_unstable, p), d, depth)?.root;
    let holonomy_product = moved_s * moved_u;
    let holonomy_gap = if product > 0.0 { (holonomy_product - product).abs() / product } else { 0.0 };
    Ok(BoxMeasure { stable, unstable, product, holonomy_product, holonomy_gap })
}

/// All admissible words of length `len`, in lexicographic order.
pub fn admissible_words(sys: &SymbolicSystem, len: usize) -> Vec<Vec<u8>> {
    let m = sys.matrix();
    let mut words: Vec<Vec<u8>> = (0..m.size() as u8).map(|a| vec![a]).collect();
    for _ in 1..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap() as usize;
                m.successors(last).map(move |b| {
                    let mut v = w.clone();
                    v.push(b as u8);
                    v
                })
            })
            .collect();
    }
    words
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParryRow {
    pub word: Vec<u8>,
    pub box_mass: f64,
    pub parry: f64,
    pub gap: f64,
}

/// Normalised box masses of the depth-`k` generating cover (cylinders on
/// `[0, k−1]`) against the Parry measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParryComparison {
    pub k: usize,
    pub total: f64,
    pub rows: Vec<ParryRow>,
    pub max_gap: f64,
}

impl ParryComparison {
    /// `P(x(1) = b | x(0) = a)` from the normalised masses; `None` when `a`
    /// carries no mass or `k < 2`.
    pub fn conditional(&self, a: u8, b: u8) -> Option<f64> {
        if self.k < 2 {
            return None;
        }
        let from_a: f64 = self.rows.iter().filter(|r| r.word[0] == a).map(|r| r.box_mass).sum();
        if from_a == 0.0 {
            return None;
        }
        let ab: f64 = self.rows.iter().filter(|r| r.word[0] == a && r.word[1] == b).map(|r| r.box_mass).sum();
        Some(ab / from_a)
    }
}

pub fn parry_compare(sys: &SymbolicSystem, k: usize, d: f64, depth: u32) -> Result<ParryComparison> {
    if k == 0 {
        return Err(Error::InvalidArgument("box depth must be at least 1".into()));
    }
    let parry = sys.parry()?;
    let words = admissible_words(sys, k);
    let masses: Vec<f64> = words
        .par_iter()
        .map(|w| box_measure(sys, &Cylinder::new(sys.matrix(), 0, w.clone()), d, depth).map(|b| b.product))
        .collect::<Result<_>>()?;
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptySample);
    }
    let rows: Vec<ParryRow> = words
        .into_iter()
        .zip(masses)
        .map(|(word, m)| {
            let box_mass = m / total;
            let p = parry.word_mass(&word);
            ParryRow { gap: (box_mass - p).abs() / p, box_mass, parry: p, word }
        })
        .collect();
    let max_gap = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(ParryComparison { k, total, rows, max_gap })
}

/// Smallest `p ≥ 0` with `λ^(−p) ≤ δ`.
pub fn level_for_scale(lambda: f64, delta: f64) -> Result<i64> {
    if !(delta > 0.0) {
        return Err(Error::ScaleOutOfRange(format!("scale must be positive, got {delta}")));
    }
    let mut p = 0;
    while lambda.powi(-(p as i32)) > delta {
        p += 1;
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityRow {
    pub n: u32,
    /// `max_y μ(C^n_δ(y))`.
    pub max_delta: f64,
    /// `min_x μ(C^n_ε(x))`.
    pub min_eps: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityTable {
    pub rows: Vec<HomogeneityRow>,
    pub c_observed: f64,
    /// Least-squares slope of `ln ratio` against `n`.
    pub trend: f64,
    pub flat: bool,
}

/// Largest `ln ratio` slope counted as flat.
pub const FLATNESS_SLOPE: f64 = 0.05;

/// Mass of `C^n_δ(x) = [W^s_δ(x), W^u_{δ/λ^n}(x)]`, the cylinder of `x` on
/// `[−p, p+n]` with `p` the level of `δ`.
pub fn bowen_box_mass(sys: &SymbolicSystem, x: &BiSequence, p: i64, n: u32, d: f64, depth: u32) -> Result<f64> {
    let s = hausdorff_estimate(sys, &Plaque::stable(x.clone(), p), d, depth)?.root;
    let u = hausdorff_estimate(sys, &Plaque::unstable(x.clone(), p + n as i64), d, depth)?.root;
    Ok(s * u)
}

pub fn homogeneity_check(
    sys: &SymbolicSystem,
    xs: &[BiSequence],
    ns: RangeInclusive<u32>,
    delta: f64,
    eps: f64,
    d: f64,
    depth: u32,
) -> Result<HomogeneityTable> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if !sys.matrix().is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if delta >= sys.xi() || eps >= sys.xi() {
        return Err(Error::Precondition(format!("δ = {delta} and ε = {eps} must lie below ξ = {}", sys.xi())));
    }
    let (pd, pe) = (level_for_scale(sys.lambda(), delta)?, level_for_scale(sys.lambda(), eps)?);
    let rows = ns
        .map(|n| {
            let masses = |p: i64| -> Result<Vec<f64>> { xs.iter().map(|x| bowen_box_mass(sys, x, p, n, d, depth)).collect() };
            let max_delta = masses(pd)?.into_iter().fold(0.0, f64::max);
            let min_eps = masses(pe)?.into_iter().fold(f64::INFINITY, f64::min);
            Ok(HomogeneityRow { n, max_delta, min_eps, ratio: max_delta / min_eps })
        })
        .collect::<Result<Vec<_>>>()?;
    let c_observed = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let trend = if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
        let fit: LineFit = crate::dimension::fit_line(&xs, &ys)?;
        fit.slope
    } else {
        0.0
    };
    Ok(HomogeneityTable { flat: trend <= FLATNESS_SLOPE && c_observed.is_finite(), rows, c_observed, trend })
}

/// Closed-form intrinsic mass of an su-box on a toral system. With
/// `d = 1/e_u = 1/e_s` the `d`-dimensional Hausdorff measure of a stable or
/// unstable segment is its length in su-coordinates, so the normalised
/// product is the Lebesgue area of the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToralBoxMass {
    pub d: f64,
    pub stable: f64,
    pub unstable: f64,
    pub product: f64,
    pub normalized: f64,
}

pub fn toral_box_mass(sys: &ToralSystem, stable_len: f64, unstable_len: f64) -> ToralBoxMass {
    let (_, eu) = sys.exponents();
    let es_v = sys.from_su(SuCoords { s: 1.0, u: 0.0 });
    let eu_v = sys.from_su(SuCoords { s: 0.0, u: 1.0 });
    let jac = (es_v[0] * eu_v[1] - es_v[1] * eu_v[0]).abs();
    let product = stable_len * unstable_len;
    ToralBoxMass { d: 1.0 / eu, stable: stable_len, unstable: unstable_len, product, normalized: product * jac }
}
