use serde::{Deserialize, Serialize};

use super::{real_deviation, real_scale_index, Invertible, MetricSystem, ProductStructure, SpaceKind};
use crate::error::{Error, Result};

/// Number of window steps `N` with `diam_F / λ^(N+1) < tol`.
pub fn truncation_window(diam: f64, lambda: f64, tol: f64) -> u32 {
    let n = ((diam / tol).ln() / lambda.ln()).ceil();
    if n.is_finite() && n > 0.0 {
        n as u32
    } else {
        0
    }
}

fn check_params(lambda: f64, tol: f64, diam: f64) -> Result<()> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::InvalidLambda(lambda));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !diam.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Sup-refinement `max_{|i|≤N} dist_F(fⁱx, fⁱy) / λ^|i|` of an invertible base.
#[derive(Debug, Clone)]
pub struct Refined<B> {
    base: B,
    lambda: f64,
    tol: f64,
    window: u32,
    xi: f64,
}

pub fn refine_metric<B: Invertible>(base: B, lambda: f64, tol: f64) -> Result<Refined<B>> {
    let diam = base.diameter();
    check_params(lambda, tol, diam)?;
    let xi = base.real(base.expansive_constant());
    Ok(Refined { window: truncation_window(diam, lambda, tol), base, lambda, tol, xi })
}

impl<B: Invertible> Refined<B> {
    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    /// Overrides the expansive constant inherited from the base.
    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    /// Like [`MetricSystem::distance`] but reports non-finite base values.
    pub fn try_distance(&self, x: &B::Point, y: &B::Point) -> Result<f64> {
        let d = self.distance(x, y);
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonFinite)
        }
    }
}

impl<B: Invertible> MetricSystem for Refined<B> {
    type Point = B::Point;
    type Dist = f64;

    fn kind(&self) -> SpaceKind {
        SpaceKind::WrappedBaseMetric
    }

    fn forward(&self, p: &B::Point) -> B::Point {
        self.base.forward(p)
    }

    fn distance(&self, x: &B::Point, y: &B::Point) -> f64 {
        let diam = self.base.diameter();
        let mut best = self.base.real(self.base.distance(x, y));
        if best.is_nan() {
            return f64::NAN;
        }
        let (mut fx, mut fy) = (x.clone(), y.clone());
        let (mut bx, mut by) = (x.clone(), y.clone());
        let mut weight = 1.0;
        for _ in 0..self.window {
            weight /= self.lambda;
            // remaining terms are bounded by diam·weight
            if diam * weight <= best {
                break;
            }
            fx = self.base.forward(&fx);
            fy = self.base.forward(&fy);
            bx = self.base.backward(&bx);
            by = self.base.backward(&by);
            let term = self
                .base
                .real(self.base.distance(&fx, &fy))
                .max(self.base.real(self.base.distance(&bx, &by)))
                * weight;
            if term.is_nan() {
                return f64::NAN;
            }
            best = best.max(term);
        }
        best
    }

    fn real(&self, d: f64) -> f64 {
        d
    }

    fn scale(&self, d: f64, k: i32) -> f64 {
        d * self.lambda.powi(k)
    }

    fn deviation(&self, observed: f64, expected: f64) -> f64 {
        real_deviation(observed, expected)
    }

    fn scale_index(&self, d: f64) -> i32 {
        real_scale_index(d, self.xi, self.lambda)
    }

    fn expanding_factor(&self) -> f64 {
        self.lambda
    }

    fn expansive_constant(&self) -> f64 {
        self.xi
    }

    fn diameter(&self) -> f64 {
        self.base.diameter()
    }

    fn tolerance(&self) -> f64 {
        self.tol
    }
}

impl<B: ProductStructure> ProductStructure for Refined<B> {
    fn bracket(&self, x: &B::Point, y: &B::Point) -> Result<B::Point> {
        self.base.bracket(x, y)
    }
}

impl<B: Invertible> Invertible for Refined<B> {
    fn backward(&self, p: &B::Point) -> B::Point {
        self.base.backward(p)
    }
}

/// One-sided sup-refinement `max_{0≤i≤N} dist_F(fⁱx, fⁱy) / λⁱ` for
/// positively expansive maps.
#[derive(Debug, Clone)]
pub struct ForwardRefined<B> {
    base: B,
    lambda: f64,
    tol: f64,
    window: u32,
    xi: f64,
}

pub fn refine_forward_metric<B: MetricSystem>(base: B, lambda: f64, tol: f64) -> Result<ForwardRefined<B>> {
    let diam = base.diameter();
    check_params(lambda, tol, diam)?;
    let xi = base.real(base.expansive_constant());
    Ok(ForwardRefined { window: truncation_window(diam, lambda, tol), base, lambda, tol, xi })
}

impl<B: MetricSystem> ForwardRefined<B> {
    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn window(&self) -> u32 {
        self.window
    }
}

impl<B: MetricSystem> MetricSystem for ForwardRefined<B> {
    type Point = B::Point;
    type Dist = f64;

    fn kind(&self) -> SpaceKind {
        SpaceKind::WrappedBaseMetric
    }

    fn forward(&self, p: &B::Point) -> B::Point {
        self.base.forward(p)
    }

    fn distance(&self, x: &B::Point, y: &B::Point) -> f64 {
        let diam = self.base.diameter();
        let mut best = self.base.real(self.base.distance(x, y));
        let (mut fx, mut fy) = (x.clone(), y.clone());
        let mut weight = 1.0;
        for _ in 0..self.window {
            weight /= self.lambda;
            if diam * weight <= best {
                break;
            }
            fx = self.base.forward(&fx);
            fy = self.base.forward(&fy);
            best = best.max(self.base.real(self.base.distance(&fx, &fy)) * weight);
        }
        best
    }

    fn real(&self, d: f64) -> f64 {
        d
    }

    fn scale(&self, d: f64, k: i32) -> f64 {
        d * self.lambda.powi(k)
    }

    fn deviation(&self, observed: f64, expected: f64) -> f64 {
        real_deviation(observed, expected)
    }

    fn scale_index(&self, d: f64) -> i32 {
        real_scale_index(d, self.xi, self.lambda)
    }

    fn expanding_factor(&self) -> f64 {
        self.lambda
    }

    fn expansive_constant(&self) -> f64 {
        self.xi
    }

    fn diameter(&self) -> f64 {
        self.base.diameter()
    }

    fn tolerance(&self) -> f64 {
        self.tol
    }
}

/// Angle doubling `x ↦ 2x mod 1` with the arc-length metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct CircleDoubling;

impl MetricSystem for CircleDoubling {
    type Point = f64;
    type Dist = f64;

    fn kind(&self) -> SpaceKind {
        SpaceKind::WrappedBaseMetric
    }

    fn forward(&self, p: &f64) -> f64 {
        (2.0 * p).rem_euclid(1.0)
    }

    fn distance(&self, p: &f64, q: &f64) -> f64 {
        let d = (p - q).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    fn real(&self, d: f64) -> f64 {
        d
    }

    fn scale(&self, d: f64, k: i32) -> f64 {
        d * 2f64.powi(k)
    }

    fn deviation(&self, observed: f64, expected: f64) -> f64 {
        real_deviation(observed, expected)
    }

    fn scale_index(&self, d: f64) -> i32 {
        real_scale_index(d, 0.25, 2.0)
    }

    fn expanding_factor(&self) -> f64 {
        2.0
    }

    fn expansive_constant(&self) -> f64 {
        0.25
    }

    fn diameter(&self) -> f64 {
        0.5
    }

    fn tolerance(&self) -> f64 {
        1e-12
    }
}

/// A base metric truncated at `cap`: `min(dist, cap)`. Keeps the dynamics of
/// the wrapped system and declares its own expansive constant.
#[derive(Debug, Clone)]
pub struct ClampedMetric<S> {
    inner: S,
    cap: f64,
    xi: f64,
}

impl<S: MetricSystem> ClampedMetric<S> {
    pub fn new(inner: S, cap: f64, xi: f64) -> Result<Self> {
        if !(cap > 0.0) || !(xi > 0.0) {
            return Err(Error::InvalidArgument("cap and xi must be positive".into()));
        }
        Ok(Self { inner, cap, xi })
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: MetricSystem> MetricSystem for ClampedMetric<S> {
    type Point = S::Point;
    type Dist = f64;

    fn kind(&self) -> SpaceKind {
        SpaceKind::WrappedBaseMetric
    }

    fn forward(&self, p: &S::Point) -> S::Point {
        self.inner.forward(p)
    }

    fn distance(&self, p: &S::Point, q: &S::Point) -> f64 {
        self.inner.real(self.inner.distance(p, q)).min(self.cap)
    }

    fn real(&self, d: f64) -> f64 {
        d
    }

    fn scale(&self, d: f64, k: i32) -> f64 {
        d * self.inner.expanding_factor().powi(k)
    }

    fn deviation(&self, observed: f64, expected: f64) -> f64 {
        real_deviation(observed, expected)
    }

    fn scale_index(&self, d: f64) -> i32 {
        real_scale_index(d, self.xi, self.inner.expanding_factor())
    }

    fn expanding_factor(&self) -> f64 {
        self.inner.expanding_factor()
    }

    fn expansive_constant(&self) -> f64 {
        self.xi
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter().min(self.cap)
    }

    fn tolerance(&self) -> f64 {
        1e-12
    }
}

impl<S: Invertible> Invertible for ClampedMetric<S> {
    fn backward(&self, p: &S::Point) -> S::Point {
        self.inner.backward(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub alpha: f64,
    /// Smallest `c` with `refined ≤ c·base^α` on every sample.
    pub c: f64,
    /// Sample indices where `base > refined`.
    pub violations: Vec<usize>,
    pub samples: usize,
}

/// Fits the Hölder sandwich `base ≤ refined ≤ c·base^α`, `α = ln λ / ln k`,
/// from precomputed `(base, refined)` distance pairs.
pub fn holder_check_pairs(values: &[(f64, f64)], lambda: f64, k: f64) -> Result<HolderReport> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(lambda > 1.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    if !(k >= lambda) {
        return Err(Error::InvalidArgument(format!("Lipschitz bound k = {k} must be at least lambda = {lambda}")));
    }
    let alpha = lambda.ln() / k.ln();
    let mut c = 0.0f64;
    let mut violations = Vec::new();
    for (i, &(base, refined)) in values.iter().enumerate() {
        if !(base.is_finite() && refined.is_finite()) {
            return Err(Error::NonFinite);
        }
        if base <= 0.0 {
            return Err(Error::Coincident);
        }
        if base > refined * (1.0 + 1e-12) {
            violations.push(i);
        }
        c = c.max(refined / base.powf(alpha));
    }
    Ok(HolderReport { alpha, c, violations, samples: values.len() })
}

/// [`holder_check_pairs`] evaluated on sample point pairs.
pub fn holder_check<B, R>(base: &B, refined: &R, samples: &[(B::Point, B::Point)], k: f64) -> Result<HolderReport>
where
    B: MetricSystem,
    R: MetricSystem<Point = B::Point>,
{
    let values: Vec<(f64, f64)> = samples
        .iter()
        .map(|(x, y)| (base.real(base.distance(x, y)), refined.real(refined.distance(x, y))))
        .collect();
    holder_check_pairs(&values, refined.expanding_factor(), k)
}
