use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProductStructure;
use crate::error::{Error, Result};

/// Legs of the dynamical triangle `(x, y, z)` with `z = W^u(x) ∩ W^s(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub c0: f64,
    pub a: f64,
    pub b: f64,
    /// `c0 / max(a, b)`; `None` when both legs vanish.
    pub ratio: Option<f64>,
    /// `|c0 / max(a, b) - 1|` evaluated in the system's distance representation.
    pub deviation: Option<f64>,
    /// Scale index of `c0`: `ξ/λ^(m+1) < c0 ≤ ξ/λ^m`.
    pub scale_bucket: i32,
    /// Scale indices of the two legs (`None` for a vanishing leg).
    pub n_a: Option<i32>,
    pub n_b: Option<i32>,
}

/// Builds the third vertex as `bracket(y, x)` and reports the leg lengths.
pub fn triangle_ratio<S: ProductStructure>(sys: &S, x: &S::Point, y: &S::Point) -> Result<TriangleReport> {
    let c0 = sys.distance(x, y);
    if sys.is_zero(c0) {
        return Err(Error::Coincident);
    }
    let z = sys.bracket(y, x)?;
    let a = sys.distance(x, &z);
    let b = sys.distance(&z, y);
    let longest = if b > a { b } else { a };
    let nonzero = |d| (!sys.is_zero(d)).then(|| sys.scale_index(d));
    let (ratio, deviation) = if sys.is_zero(longest) {
        (None, None)
    } else {
        (Some(sys.real(c0) / sys.real(longest)), Some(sys.deviation(c0, longest)))
    };
    Ok(TriangleReport {
        c0: sys.real(c0),
        a: sys.real(a),
        b: sys.real(b),
        ratio,
        deviation,
        scale_bucket: sys.scale_index(c0),
        n_a: nonzero(a),
        n_b: nonzero(b),
    })
}

/// Projection of `p` along its stable set onto the unstable plaque of `r`.
pub fn holonomy_project<S: ProductStructure>(sys: &S, p: &S::Point, r: &S::Point) -> Result<S::Point> {
    sys.bracket(p, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub ratio: f64,
    /// `|dist(πp, πq) / dist(p, q) - 1|`.
    pub observed: f64,
    /// `2 / (λ^(m-1) - 2)`.
    pub bound: f64,
    pub m: i32,
    pub within_bound: bool,
}

/// Compares the distortion of a stable holonomy against the pseudo-isometry
/// bound. The scale index `m` is taken from the larger of the two distances.
pub fn holonomy_deviation<S: ProductStructure>(
    sys: &S,
    p: &S::Point,
    q: &S::Point,
    pi_p: &S::Point,
    pi_q: &S::Point,
) -> Result<HolonomyReport> {
    let d = sys.distance(p, q);
    let dp = sys.distance(pi_p, pi_q);
    if sys.is_zero(d) || sys.is_zero(dp) {
        return Err(Error::Coincident);
    }
    let xi = sys.expansive_constant();
    if !(sys.distance(p, pi_p) < xi && sys.distance(q, pi_q) < xi) {
        return Err(Error::Precondition("projection moves a point by at least xi".into()));
    }
    let longest = if dp > d { dp } else { d };
    let m = sys.scale_index(longest);
    let lam = sys.expanding_factor();
    let denom = lam.powi(m - 1) - 2.0;
    if m < 1 || denom <= 0.0 {
        return Err(Error::BoundUndefined(m));
    }
    let bound = 2.0 / denom;
    let observed = sys.deviation(dp, d);
    Ok(HolonomyReport {
        ratio: sys.real(dp) / sys.real(d),
        observed,
        bound,
        m,
        within_bound: observed <= bound,
    })
}

/// Triangle statistics of the pairs sampled at one nominal scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scale: f64,
    pub pairs: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
}

/// Empirical `(ε, δ)` curve: for each batch the largest `|ratio − 1|`.
/// Pairs are evaluated in parallel; output order follows `batches`.
pub fn triangle_curve<S: ProductStructure>(sys: &S, batches: &[(f64, Vec<(S::Point, S::Point)>)]) -> Result<Vec<CurvePoint>> {
    batches
        .iter()
        .map(|(scale, pairs)| {
            let devs: Vec<f64> = pairs
                .par_iter()
                .map(|(x, y)| triangle_ratio(sys, x, y).map(|r| r.deviation.unwrap_or(0.0)))
                .collect::<Result<_>>()?;
            if devs.is_empty() {
                return Err(Error::EmptySample);
            }
            Ok(CurvePoint {
                scale: *scale,
                pairs: devs.len(),
                max_deviation: devs.iter().copied().fold(0.0, f64::max),
                mean_deviation: devs.iter().sum::<f64>() / devs.len() as f64,
            })
        })
        .collect()
}
