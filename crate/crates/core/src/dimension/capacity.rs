use serde::{Deserialize, Serialize};

use super::cover::{ln_big, symbolic_cover_report, toral_cover_bounds, CoverBounds, CoverEntry, CoverReport};
use super::Subset;
use crate::error::{Error, Result};
use crate::symbolic::{strict_level, SymbolicSystem};
use crate::torus::ToralSystem;

/// Number of largest scales excluded from every capacity regression.
pub const DROPPED_SCALES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {n}")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = if n > 2 { (ssr / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LineFit { slope, intercept, slope_stderr, residual: (ssr / nf).sqrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub residual: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub scales_used: usize,
    pub scales_dropped: usize,
}

/// Least-squares slope of `ln cov` against `−ln ε` after dropping the
/// [`DROPPED_SCALES`] largest scales.
pub fn fit_capacity(entries: &[CoverEntry]) -> Result<CapacityFit> {
    if entries.len() < 4 {
        return Err(Error::InvalidArgument(format!("capacity needs at least 4 scales, got {}", entries.len())));
    }
    let mut sorted: Vec<&CoverEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let used = &sorted[DROPPED_SCALES..];
    let first = used[0].ln_count;
    if used.iter().all(|e| e.ln_count == first) {
        return Err(Error::DegenerateFit("all covering numbers are equal".into()));
    }
    let xs: Vec<f64> = used.iter().map(|e| -e.eps.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|e| e.ln_count).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(CapacityFit {
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        residual: fit.residual,
        eps_min: used[used.len() - 1].eps,
        eps_max: used[0].eps,
        scales_used: used.len(),
        scales_dropped: DROPPED_SCALES,
    })
}

/// `lo_exp..=hi_exp` powers `base^(-k)`.
pub fn geometric_scales(base: f64, lo_exp: i32, hi_exp: i32) -> Vec<f64> {
    (lo_exp..=hi_exp).map(|k| base.powi(-k)).collect()
}

/// `ε = 2^-4 .. 2^-14`.
pub fn default_symbolic_scales() -> Vec<f64> {
    geometric_scales(2.0, 4, 14)
}

/// Powers of `λ` spanning `2^-4 .. 2^-14`, at least seven of them. The
/// exact counts are step functions of `ε` that jump at powers of `λ`, so
/// scales in phase with `λ` avoid aliasing in the fit. Equals
/// [`default_symbolic_scales`] at `λ = 2`.
pub fn symbolic_scales(lambda: f64) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    let lo = ((4.0 * ln2 / lambda.ln()) - 1e-9).ceil().max(1.0) as i32;
    let hi = (((14.0 * ln2 / lambda.ln()) + 1e-9).floor() as i32).max(lo + 6);
    geometric_scales(lambda, lo, hi)
}

/// Nine geometric scales from 0.2 down to 0.01.
pub fn default_toral_scales() -> Vec<f64> {
    (0..9).map(|k| 0.2 * (0.05f64).powf(k as f64 / 8.0)).collect()
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.len() < 4 {
        return Err(Error::InvalidArgument(format!("capacity needs at least 4 scales, got {}", scales.len())));
    }
    if let Some(e) = scales.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::ScaleOutOfRange(format!("scale {e} is not a positive finite number")));
    }
    Ok(())
}

/// Exact covering number of a symbolic subset: sets of diameter `< ε` are
/// central `(2m+1)`-cylinders; local stable and unstable sets fix one side.
pub(crate) fn symbolic_subset_cov(sys: &SymbolicSystem, subset: &Subset, eps: f64) -> Result<CoverEntry> {
    let Some(m) = strict_level(sys.lambda(), eps)? else {
        return Ok(CoverEntry::from_usize(eps, 1));
    };
    let m = m as usize;
    let count = match subset {
        Subset::Whole => sys.exact_cov(eps)?,
        // coordinates i ≤ 1 fixed; free coordinates 2..=m
        Subset::LocalUnstable(x) => {
            sys.check_point(x)?;
            sys.count_words_from(x.at(1) as usize, m.max(1))
        }
        Subset::LocalStable(x) => {
            sys.check_point(x)?;
            sys.count_words_to(x.at(-1) as usize, m.max(1))
        }
    };
    Ok(CoverEntry { eps, ln_count: ln_big(&count), count: count.to_string() })
}

pub fn capacity_symbolic(sys: &SymbolicSystem, subset: &Subset, scales: &[f64]) -> Result<(CoverReport, CapacityFit)> {
    check_scales(scales)?;
    let report = match subset {
        Subset::Whole => symbolic_cover_report(sys, scales)?,
        _ => CoverReport {
            method: super::CoverMethod::ExactSymbolic,
            entries: scales.iter().map(|&e| symbolic_subset_cov(sys, subset, e)).collect::<Result<_>>()?,
        },
    };
    let fit = fit_capacity(&report.entries)?;
    Ok((report, fit))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToralCapacity {
    pub bounds: Vec<CoverBounds>,
    pub greedy: CapacityFit,
    pub packing: CapacityFit,
    /// Fit of the geometric mean of the two bounds.
    pub combined: CapacityFit,
}

pub fn capacity_toral(sys: &ToralSystem, scales: &[f64]) -> Result<ToralCapacity> {
    check_scales(scales)?;
    let bounds = toral_cover_bounds(sys, scales)?;
    let (g, p) = super::cover::toral_cover_reports(&bounds);
    let mean: Vec<CoverEntry> = g
        .entries
        .iter()
        .zip(&p.entries)
        .map(|(a, b)| CoverEntry {
            eps: a.eps,
            count: format!("{:.3}", ((a.ln_count + b.ln_count) / 2.0).exp()),
            ln_count: (a.ln_count + b.ln_count) / 2.0,
        })
        .collect();
    Ok(ToralCapacity {
        greedy: fit_capacity(&g.entries)?,
        packing: fit_capacity(&p.entries)?,
        combined: fit_capacity(&mean)?,
        bounds,
    })
}
