use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::capacity::fit_line;
use super::cover::ln_big;
use super::Subset;
use crate::dynamics::{dyn_metric, forward_dyn_metric, DynMode, Window};
use crate::error::{Error, Result};
use crate::symbolic::{strict_level, BiSequence, SymbolicSystem};
use crate::torus::{SuCoords, ToralSystem, TorusPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    ExactSymbolic,
    /// `−ln vol` of sampled Bowen balls in place of `ln cov`.
    BowenVolume,
    GreedyUnstable,
}

/// `ln cov_ξ(X, d_n)` for the three dynamical metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u32,
    pub two_sided: f64,
    pub forward: f64,
    pub backward: f64,
}

impl GrowthRow {
    /// `(1/n)·ln cov` for the two-sided metric.
    pub fn rate(&self) -> f64 {
        self.two_sided / self.n as f64
    }
}

/// Entropy in the two-sided convention (`ent`) together with the one-sided
/// `ent⁺`, `ent⁻`. The standard convention is `ent / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub method: EntropyMethod,
    pub two_sided: f64,
    pub forward: f64,
    pub backward: f64,
    pub standard: f64,
    /// `|ent − 2·ent⁺| / ent`, or the absolute gap when `ent = 0`.
    pub gap: f64,
    pub fit_from: u32,
    pub fit_to: u32,
    pub table: Vec<GrowthRow>,
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max < 4 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 4, got {n_max}")));
    }
    Ok(())
}

fn fit_range(n_max: u32) -> (u32, u32) {
    (n_max.div_ceil(2), n_max)
}

/// Slope of the columns against `n` over the upper half of the table.
fn report_from_table(method: EntropyMethod, table: Vec<GrowthRow>, n_max: u32) -> Result<EntropyReport> {
    let (lo, hi) = fit_range(n_max);
    let rows: Vec<&GrowthRow> = table.iter().filter(|r| r.n >= lo && r.n <= hi).collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let col = |f: fn(&GrowthRow) -> f64| -> Result<f64> {
        let ys: Vec<f64> = rows.iter().map(|r| f(r)).collect();
        Ok(fit_line(&xs, &ys)?.slope)
    };
    let two_sided = col(|r| r.two_sided)?;
    let forward = col(|r| r.forward)?;
    let backward = col(|r| r.backward)?;
    let diff = (two_sided - 2.0 * forward).abs();
    let gap = if two_sided.abs() > 0.0 { diff / two_sided.abs() } else { diff };
    Ok(EntropyReport {
        method,
        two_sided,
        forward,
        backward,
        standard: two_sided / 2.0,
        gap,
        fit_from: lo,
        fit_to: hi,
        table,
    })
}

/// Exact `cov_ξ(X, d_n)` on a symbolic subset. With `m = m(ξ)` the sets of
/// `d_n`-diameter `< ξ` are cylinders on `[−m−n_b, m+n_f]`.
pub fn symbolic_dyn_cov(sys: &SymbolicSystem, subset: &Subset, mode: DynMode) -> Result<BigUint> {
    let m = strict_level(sys.lambda(), sys.xi())?.expect("xi < lambda") as i64;
    let n = mode.n as i64;
    let (back, fwd) = match mode.window {
        Window::TwoSided => (n, n),
        Window::Forward => (0, n),
        Window::Backward => (n, 0),
    };
    let (lo, hi) = (-m - back, m + fwd);
    Ok(match subset {
        Subset::Whole => sys.count_words((hi - lo + 1) as usize),
        // coordinates i ≤ 1 are fixed
        Subset::LocalUnstable(x) => {
            sys.check_point(x)?;
            sys.count_words_from(x.at(1) as usize, hi.max(1) as usize)
        }
        // coordinates i ≥ −1 are fixed
        Subset::LocalStable(x) => {
            sys.check_point(x)?;
            sys.count_words_to(x.at(-1) as usize, (-lo).max(1) as usize)
        }
    })
}

pub fn entropy_symbolic(sys: &SymbolicSystem, subset: &Subset, n_max: u32) -> Result<EntropyReport> {
    check_n_max(n_max)?;
    let table = (1..=n_max)
        .map(|n| {
            Ok(GrowthRow {
                n,
                two_sided: ln_big(&symbolic_dyn_cov(sys, subset, DynMode::two_sided(n))?),
                forward: ln_big(&symbolic_dyn_cov(sys, subset, DynMode::forward(n))?),
                backward: ln_big(&symbolic_dyn_cov(sys, subset, DynMode::backward(n))?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report_from_table(EntropyMethod::ExactSymbolic, table, n_max)
}

/// Sampling effort for the toral Bowen-ball estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowenSampling {
    pub base_points: usize,
    pub proposals: usize,
    pub seed: u64,
}

impl Default for BowenSampling {
    fn default() -> Self {
        Self { base_points: 8, proposals: 2000, seed: 0 }
    }
}

/// Volume of `{y : d_n(x, y) < ξ}` averaged over base points. Proposals are
/// uniform on the su-box with `ρ`-half-widths `2ξ/λ^n` along each expanded
/// direction and `2ξ` otherwise, which contains the ball.
pub fn bowen_ball_volume(sys: &ToralSystem, mode: DynMode, sampling: &BowenSampling) -> Result<f64> {
    let xi = sys.xi();
    let lam = sys.lambda();
    let (es, eu) = sys.exponents();
    let n = mode.n as i32;
    let (shrink_s, shrink_u) = match mode.window {
        Window::TwoSided => (n, n),
        Window::Forward => (0, n),
        Window::Backward => (n, 0),
    };
    let a_s = (2.0 * xi / lam.powi(shrink_s)).powf(1.0 / es);
    let a_u = (2.0 * xi / lam.powi(shrink_u)).powf(1.0 / eu);
    let es_v = sys.from_su(SuCoords { s: 1.0, u: 0.0 });
    let eu_v = sys.from_su(SuCoords { s: 0.0, u: 1.0 });
    let jac = (es_v[0] * eu_v[1] - es_v[1] * eu_v[0]).abs();
    let box_area = 4.0 * a_s * a_u * jac;
    let seeds: Vec<u64> = (0..sampling.base_points as u64).map(|j| sampling.seed ^ (j.wrapping_mul(0x9E37_79B9_7F4A_7C15) + mode.n as u64)).collect();
    let hits: usize = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let x = sys.random_point(&mut rng);
            (0..sampling.proposals)
                .filter(|_| {
                    let c = SuCoords { s: rng.random_range(-a_s..a_s), u: rng.random_range(-a_u..a_u) };
                    let y = x.offset(sys.from_su(c));
                    dyn_metric(sys, &x, &y, mode) < xi
                })
                .count()
        })
        .sum();
    if hits == 0 {
        return Err(Error::EmptySample);
    }
    let total = (sampling.base_points * sampling.proposals) as f64;
    Ok(box_area * hits as f64 / total)
}

pub fn entropy_toral(sys: &ToralSystem, n_max: u32, sampling: &BowenSampling) -> Result<EntropyReport> {
    check_n_max(n_max)?;
    let table = (1..=n_max)
        .map(|n| {
            Ok(GrowthRow {
                n,
                two_sided: -bowen_ball_volume(sys, DynMode::two_sided(n), sampling)?.ln(),
                forward: -bowen_ball_volume(sys, DynMode::forward(n), sampling)?.ln(),
                backward: -bowen_ball_volume(sys, DynMode::backward(n), sampling)?.ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report_from_table(EntropyMethod::BowenVolume, table, n_max)
}

fn upper_half_slope(values: &[(u32, f64)], n_max: u32) -> Result<f64> {
    let (lo, hi) = fit_range(n_max);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        values.iter().filter(|(n, _)| *n >= lo && *n <= hi).map(|(n, v)| (*n as f64, *v)).unzip();
    Ok(fit_line(&xs, &ys)?.slope)
}

/// `ent⁺(W^u_ξ(x))` from the exact counts of forward extensions of the past of `x`.
pub fn local_unstable_entropy_symbolic(sys: &SymbolicSystem, x: &BiSequence, n_max: u32) -> Result<f64> {
    check_n_max(n_max)?;
    let subset = Subset::LocalUnstable(x.clone());
    let values = (1..=n_max)
        .map(|n| Ok((n, ln_big(&symbolic_dyn_cov(sys, &subset, DynMode::forward(n))?))))
        .collect::<Result<Vec<_>>>()?;
    upper_half_slope(&values, n_max)
}

/// Greedy `d_n⁺` cover of a grid on the unstable segment through `x`,
/// scanned in order of the segment parameter.
pub fn unstable_segment_cover(sys: &ToralSystem, x: &TorusPoint, n: u32) -> usize {
    let xi = sys.xi();
    let (_, eu) = sys.exponents();
    let half_len = xi.powf(1.0 / eu);
    let delta = xi / 6.0;
    // d_n⁺ between grid neighbours is (step/2 · |b|^n)^e_u = (step/2)^e_u λ^n
    let step = 2.0 * (delta / sys.lambda().powi(n as i32)).powf(1.0 / eu);
    let count = (2.0 * half_len / step).ceil() as usize + 1;
    let points: Vec<TorusPoint> = (0..count)
        .map(|i| {
            let t = (-half_len + i as f64 * step).min(half_len);
            x.offset(sys.from_su(SuCoords { s: 0.0, u: t }))
        })
        .collect();
    let radius = xi / 2.0 - delta - 1e-12 * xi;
    let mut centres = 0;
    let mut i = 0;
    while i < points.len() {
        centres += 1;
        let mut j = i + 1;
        while j < points.len() && forward_dyn_metric(sys, &points[i], &points[j], n) <= radius {
            j += 1;
        }
        i = j;
    }
    centres
}

pub fn local_unstable_entropy_toral(sys: &ToralSystem, x: &TorusPoint, n_max: u32) -> Result<f64> {
    check_n_max(n_max)?;
    let values: Vec<(u32, f64)> =
        (1..=n_max).into_par_iter().map(|n| (n, (unstable_segment_cover(sys, x, n) as f64).ln())).collect();
    upper_half_slope(&values, n_max)
}

/// Local unstable entropies across base points, compared with `ent(M)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub estimates: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `(max − min) / reference`.
    pub spread: f64,
    pub reference: f64,
    /// `max |estimate − reference| / reference`.
    pub reference_gap: f64,
}

impl HomogeneityReport {
    pub fn new(estimates: Vec<f64>, reference: f64) -> Result<Self> {
        if estimates.is_empty() {
            return Err(Error::EmptySample);
        }
        let min = estimates.iter().copied().fold(f64::INFINITY, f64::min);
        let max = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let reference_gap = estimates.iter().map(|e| (e - reference).abs()).fold(0.0, f64::max) / reference;
        Ok(Self { spread: (max - min) / reference, estimates, min, max, reference, reference_gap })
    }
}

pub fn unstable_homogeneity_symbolic(sys: &SymbolicSystem, xs: &[BiSequence], n_max: u32) -> Result<HomogeneityReport> {
    let estimates = xs.iter().map(|x| local_unstable_entropy_symbolic(sys, x, n_max)).collect::<Result<Vec<_>>>()?;
    let ent = entropy_symbolic(sys, &Subset::Whole, n_max)?;
    HomogeneityReport::new(estimates, ent.two_sided / 2.0)
}

pub fn unstable_homogeneity_toral(
    sys: &ToralSystem,
    xs: &[TorusPoint],
    n_max: u32,
    sampling: &BowenSampling,
) -> Result<HomogeneityReport> {
    let estimates = xs.iter().map(|x| local_unstable_entropy_toral(sys, x, n_max)).collect::<Result<Vec<_>>>()?;
    let ent = entropy_toral(sys, n_max, sampling)?;
    HomogeneityReport::new(estimates, ent.two_sided / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_entropies_exact() {
        let s = SymbolicSystem::full_shift(2, 2.0).unwrap();
        let r = entropy_symbolic(&s, &Subset::Whole, 8).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((r.two_sided - 2.0 * ln2).abs() < 1e-12);
        assert!((r.forward - ln2).abs() < 1e-12);
        assert!((r.backward - ln2).abs() < 1e-12);
        assert!(r.gap < 1e-12);
        assert_eq!(r.table.len(), 8);
    }

    #[test]
    fn rejects_short_horizon() {
        let s = SymbolicSystem::full_shift(2, 2.0).unwrap();
        assert!(matches!(entropy_symbolic(&s, &Subset::Whole, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn local_unstable_full_shift() {
        let s = SymbolicSystem::full_shift(2, 2.0).unwrap();
        let x = BiSequence::constant_with(0, &[(1, 1)]);
        let h = local_unstable_entropy_symbolic(&s, &x, 8).unwrap();
        assert!((h - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn unstable_subset_has_no_backward_growth() {
        let s = SymbolicSystem::golden_mean(2.0).unwrap();
        let r = entropy_symbolic(&s, &Subset::LocalUnstable(BiSequence::constant(0)), 10).unwrap();
        assert!(r.backward.abs() < 1e-12);
        assert!(r.forward > 0.4);
    }

    #[test]
    fn segment_cover_grows() {
        let t = ToralSystem::cat_map();
        let x = TorusPoint::new(0.3, 0.6);
        let c2 = unstable_segment_cover(&t, &x, 2);
        let c4 = unstable_segment_cover(&t, &x, 4);
        let ratio = c4 as f64 / c2 as f64;
        assert!((ratio / t.lambda().powi(2) - 1.0).abs() < 0.2, "{c2} {c4}");
    }
}
