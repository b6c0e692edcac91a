use serde::{Deserialize, Serialize};

use super::capacity::{capacity_symbolic, capacity_toral, symbolic_scales, CapacityFit};
use super::cover::{cov_eps_sample, euclid_reach, greedy_cover, packing_count, GridSample};
use super::entropy::{entropy_symbolic, entropy_toral, symbolic_dyn_cov, BowenSampling, EntropyReport};
use super::Subset;
use crate::dynamics::{dyn_metric, DynMode};
use crate::error::{Error, Result};
use crate::symbolic::SymbolicSystem;
use crate::torus::{ToralSystem, TorusPoint};

/// Both sides of `cap(X) = ent(X)/ln λ`; local unstable and stable sets use
/// the matching one-sided entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalReport {
    pub lambda: f64,
    pub capacity: f64,
    pub entropy_over_log_lambda: f64,
    /// `|capacity − ent/ln λ| / (ent/ln λ)`.
    pub gap: f64,
    pub fit: CapacityFit,
    pub entropy: EntropyReport,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if b != 0.0 {
        (a - b).abs() / b.abs()
    } else {
        (a - b).abs()
    }
}

pub fn check_fundamental_symbolic(sys: &SymbolicSystem, subset: &Subset, n_max: u32) -> Result<FundamentalReport> {
    let (_, fit) = capacity_symbolic(sys, subset, &symbolic_scales(sys.lambda()))?;
    let entropy = entropy_symbolic(sys, subset, n_max)?;
    let ent = match subset {
        Subset::Whole => entropy.two_sided,
        Subset::LocalUnstable(_) => entropy.forward,
        Subset::LocalStable(_) => entropy.backward,
    };
    let rhs = ent / sys.lambda().ln();
    Ok(FundamentalReport {
        lambda: sys.lambda(),
        capacity: fit.slope,
        entropy_over_log_lambda: rhs,
        gap: relative_gap(fit.slope, rhs),
        fit,
        entropy,
    })
}

pub fn check_fundamental_toral(
    sys: &ToralSystem,
    scales: &[f64],
    n_max: u32,
    sampling: &BowenSampling,
) -> Result<FundamentalReport> {
    let cap = capacity_toral(sys, scales)?;
    let entropy = entropy_toral(sys, n_max, sampling)?;
    let rhs = entropy.two_sided / sys.lambda().ln();
    Ok(FundamentalReport {
        lambda: sys.lambda(),
        capacity: cap.combined.slope,
        entropy_over_log_lambda: rhs,
        gap: relative_gap(cap.combined.slope, rhs),
        fit: cap.combined,
        entropy,
    })
}

/// One row of `cov_{ξ/λ^k}(M, dist) = cov_ξ(M, d_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovIdentityRow {
    pub k: u32,
    pub scaled: String,
    pub dynamical: String,
    pub equal: bool,
}

/// Exact comparison; the right side comes from walks in the block graph.
pub fn cov_identity_check(sys: &SymbolicSystem, ks: impl IntoIterator<Item = u32>) -> Result<Vec<CovIdentityRow>> {
    ks.into_iter()
        .map(|k| {
            let scaled = sys.exact_cov(sys.xi() / sys.lambda().powi(k as i32))?;
            let dynamical = sys.block_walk_count(2 * k as usize);
            debug_assert_eq!(dynamical, symbolic_dyn_cov(sys, &Subset::Whole, DynMode::two_sided(k))?);
            Ok(CovIdentityRow { k, equal: scaled == dynamical, scaled: scaled.to_string(), dynamical: dynamical.to_string() })
        })
        .collect()
}

/// Sampled comparison: both sides are bracketed by greedy and packing
/// counts and agree when the brackets overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToralIdentityRow {
    pub k: u32,
    pub scaled: (usize, usize),
    pub dynamical: (usize, usize),
    pub overlap: bool,
}

pub fn cov_identity_toral(sys: &ToralSystem, ks: impl IntoIterator<Item = u32>) -> Result<Vec<ToralIdentityRow>> {
    let xi = sys.xi();
    ks.into_iter()
        .map(|k| {
            let lam_k = sys.lambda().powi(k as i32);
            let eps = xi / lam_k;
            // d_k ≤ λ^k ρ on small vectors, so this grid is ξ/6-dense for d_k
            let grid = GridSample::with_density(sys, eps / 6.0)?;
            let s = cov_eps_sample(sys, &grid, eps)?;
            let radius = xi / 2.0 - lam_k * grid.density - 1e-12 * xi;
            let mode = DynMode::two_sided(k);
            let dist = |a: &TorusPoint, b: &TorusPoint| dyn_metric(sys, a, b, mode);
            let greedy = greedy_cover(&grid.points, dist, radius, euclid_reach(sys, radius));
            let packing = packing_count(&grid.points, dist, xi, euclid_reach(sys, xi));
            let scaled = (s.packing_lower, s.greedy_upper);
            let dynamical = (packing, greedy);
            let overlap = scaled.0 <= dynamical.1 && dynamical.0 <= scaled.1;
            Ok(ToralIdentityRow { k, scaled, dynamical, overlap })
        })
        .collect()
}

/// `λ_ideal = e^(ent/dim)`.
pub fn ideal_factor(ent: f64, dim: u32) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !ent.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok((ent / dim as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionBound {
    pub ideal: f64,
    pub lambda: f64,
    /// `dim·ln λ ≤ ent` up to the relative slack.
    pub holds: bool,
}

pub fn dimension_bound(ent: f64, dim: u32, lambda: f64, slack: f64) -> Result<DimensionBound> {
    let ideal = ideal_factor(ent, dim)?;
    let holds = dim as f64 * lambda.ln() <= ent * (1.0 + slack);
    Ok(DimensionBound { ideal, lambda, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_small_k() {
        let s = SymbolicSystem::full_shift(2, 2.0).unwrap();
        let rows = cov_identity_check(&s, 0..3).unwrap();
        assert!(rows.iter().all(|r| r.equal));
        assert_eq!(rows[1].scaled, "128");
        let g = SymbolicSystem::golden_mean(2.0).unwrap();
        assert_eq!(cov_identity_check(&g, [0]).unwrap()[0].scaled, "13");
    }

    #[test]
    fn ideal_factor_values() {
        let lam = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((ideal_factor(2.0 * lam.ln(), 2).unwrap() - lam).abs() < 1e-12);
        assert_eq!(ideal_factor(0.0, 1).unwrap(), 1.0);
        assert!(ideal_factor(1.0, 0).is_err());
        assert!(dimension_bound(2.0 * lam.ln(), 2, lam, 1e-12).unwrap().holds);
        assert!(!dimension_bound(2.0 * lam.ln(), 2, 3.0, 1e-12).unwrap().holds);
    }
}
