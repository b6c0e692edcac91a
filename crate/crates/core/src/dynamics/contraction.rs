use serde::{Deserialize, Serialize};

use super::Invertible;
use crate::error::{Error, Result};

/// Which local invariant set the second point is claimed to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalBranch {
    /// `y ∈ W^s_ξ(x)`, iterated with `f`.
    Stable,
    /// `y ∈ W^u_ξ(x)`, iterated with `f⁻¹`.
    Unstable,
}

/// `ratios[k]` is the normalised distance after `k + 1` iterates; it equals 1
/// when the geometric law holds. `deviations[k] = |ratios[k] - 1|` computed
/// in the system's own distance representation (exact for symbolic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub initial_distance: f64,
    pub ratios: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

fn step<S: Invertible>(sys: &S, p: &S::Point, inverse: bool) -> S::Point {
    if inverse {
        sys.backward(p)
    } else {
        sys.forward(p)
    }
}

/// Checks `dist(fⁿx, fⁿy) = λ⁻ⁿ dist(x, y)` for `1 ≤ n ≤ n_max` (stable
/// branch) or the same law under `f⁻¹` (unstable branch).
pub fn stable_contraction_check<S: Invertible>(
    sys: &S,
    x: &S::Point,
    y: &S::Point,
    branch: LocalBranch,
    n_max: u32,
) -> Result<ContractionReport> {
    let d0 = sys.distance(x, y);
    if sys.is_zero(d0) {
        return Err(Error::Coincident);
    }
    let xi = sys.expansive_constant();
    if d0 > xi {
        return Err(Error::Precondition(format!(
            "initial distance {} exceeds the expansive constant",
            sys.real(d0)
        )));
    }
    let inverse = branch == LocalBranch::Unstable;
    let lambda = sys.expanding_factor();
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut ratios = Vec::with_capacity(n_max as usize);
    let mut deviations = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        a = step(sys, &a, inverse);
        b = step(sys, &b, inverse);
        let dn = sys.distance(&a, &b);
        if dn > xi {
            return Err(Error::Precondition(format!(
                "iterate {n} separates to {} > xi; second point is not in the local {:?} set",
                sys.real(dn),
                branch
            )));
        }
        ratios.push(sys.real(dn) * lambda.powi(n as i32) / sys.real(d0));
        deviations.push(sys.deviation(dn, sys.scale(d0, -(n as i32))));
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(ContractionReport { initial_distance: sys.real(d0), ratios, deviations, max_deviation })
}

/// Forward-expansion law: if `dist(fx, fy) = λ·dist(x, y)` then
/// `dist(fᵏx, fᵏy) = λᵏ·dist(x, y)` for every `k ≥ 1` with
/// `λ^(k-1)·dist(x, y) ≤ ξ`. With `inverse` the same law is checked for `f⁻¹`.
pub fn forward_expansion_check<S: Invertible>(
    sys: &S,
    x: &S::Point,
    y: &S::Point,
    inverse: bool,
) -> Result<ContractionReport> {
    let d0 = sys.distance(x, y);
    if sys.is_zero(d0) {
        return Err(Error::Coincident);
    }
    let xi = sys.expansive_constant();
    if d0 > xi {
        return Err(Error::Precondition("initial distance exceeds the expansive constant".into()));
    }
    let tol = sys.tolerance();
    let first = sys.distance(&step(sys, x, inverse), &step(sys, y, inverse));
    if sys.deviation(first, sys.scale(d0, 1)) > tol {
        return Err(Error::Precondition("first iterate does not expand by lambda".into()));
    }
    let lambda = sys.expanding_factor();
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut ratios = Vec::new();
    let mut deviations = Vec::new();
    let mut k = 1i32;
    while sys.scale(d0, k - 1) <= xi {
        a = step(sys, &a, inverse);
        b = step(sys, &b, inverse);
        let dk = sys.distance(&a, &b);
        ratios.push(sys.real(dk) / (lambda.powi(k) * sys.real(d0)));
        deviations.push(sys.deviation(dk, sys.scale(d0, k)));
        k += 1;
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(ContractionReport { initial_distance: sys.real(d0), ratios, deviations, max_deviation })
}
