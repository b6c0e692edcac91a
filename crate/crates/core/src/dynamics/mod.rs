//! System-agnostic pieces: the metric-system traits, dynamical metrics,
//! the self-similarity verifier, the sup-refinement operator and the
//! bracket-based triangle and holonomy statistics.
//!
//! A [`MetricSystem`] pairs a map `f` with a metric whose values live in an
//! associated [`MetricSystem::Dist`] type. Symbolic systems use an exact
//! exponent representation, so identities such as
//! `max(d(fp, fq), d(f⁻¹p, f⁻¹q)) = λ·d(p, q)` can be checked with equality.
//! Real-valued systems use `f64` and a relative tolerance.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::Result;

mod contraction;
mod refine;
mod triangle;
mod verify;

pub use contraction::{
    forward_expansion_check, stable_contraction_check, ContractionReport, LocalBranch,
};
pub use refine::{
    holder_check, holder_check_pairs, refine_forward_metric, refine_metric, truncation_window,
    CircleDoubling, ClampedMetric, ForwardRefined, HolderReport, Refined,
};
pub use triangle::{
    holonomy_deviation, holonomy_project, triangle_curve, triangle_ratio, CurvePoint, HolonomyReport, TriangleReport,
};
pub use verify::{
    verify_forward_self_similar, verify_self_similar, RejectReason, RejectedPair, VerifyReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Symbolic,
    Toral,
    WrappedBaseMetric,
}

/// A map together with a compatible metric, an expanding factor `λ > 1`
/// and an expansive constant `ξ`.
///
/// All implementations are immutable after construction and every method
/// is a pure function of its inputs.
pub trait MetricSystem: Sync {
    type Point: Clone + Debug + Send + Sync;
    type Dist: Copy + PartialOrd + Debug + Send + Sync;

    fn kind(&self) -> SpaceKind;

    fn forward(&self, p: &Self::Point) -> Self::Point;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Self::Dist;

    /// Numeric value of a distance.
    fn real(&self, d: Self::Dist) -> f64;

    /// `λ^k · d`, exactly when the representation allows it.
    fn scale(&self, d: Self::Dist, k: i32) -> Self::Dist;

    /// `|observed / expected - 1|`; zero when both vanish.
    fn deviation(&self, observed: Self::Dist, expected: Self::Dist) -> f64;

    /// Largest integer `m` with `d ≤ ξ / λ^m`, i.e. `ξ/λ^(m+1) < d ≤ ξ/λ^m`.
    fn scale_index(&self, d: Self::Dist) -> i32;

    fn expanding_factor(&self) -> f64;

    fn expansive_constant(&self) -> Self::Dist;

    /// Diameter of the whole space.
    fn diameter(&self) -> f64;

    /// Relative tolerance for identities that hold exactly in theory;
    /// `0.0` for exact representations.
    fn tolerance(&self) -> f64;

    fn is_zero(&self, d: Self::Dist) -> bool {
        self.real(d) == 0.0
    }
}

/// Homeomorphisms: `f⁻¹` is a total function.
pub trait Invertible: MetricSystem {
    fn backward(&self, p: &Self::Point) -> Self::Point;
}

/// Systems with canonical coordinates.
pub trait ProductStructure: Invertible {
    /// `[x, y]`: the unique point of `W^s(x) ∩ W^u(y)` for nearby `x, y`.
    fn bracket(&self, x: &Self::Point, y: &Self::Point) -> Result<Self::Point>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    TwoSided,
    Forward,
    Backward,
}

/// Which dynamical metric to evaluate and over how many steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynMode {
    pub window: Window,
    pub n: u32,
}

impl DynMode {
    pub fn two_sided(n: u32) -> Self {
        Self { window: Window::TwoSided, n }
    }

    pub fn forward(n: u32) -> Self {
        Self { window: Window::Forward, n }
    }

    pub fn backward(n: u32) -> Self {
        Self { window: Window::Backward, n }
    }
}

fn max_dist<D: PartialOrd>(a: D, b: D) -> D {
    if b > a {
        b
    } else {
        a
    }
}

/// Maximum of `dist(f^k x, f^k y)` over the orbit window described by `mode`.
pub fn dyn_metric<S: Invertible>(sys: &S, x: &S::Point, y: &S::Point, mode: DynMode) -> S::Dist {
    let mut best = sys.distance(x, y);
    if matches!(mode.window, Window::TwoSided | Window::Forward) {
        let (mut fx, mut fy) = (x.clone(), y.clone());
        for _ in 0..mode.n {
            fx = sys.forward(&fx);
            fy = sys.forward(&fy);
            best = max_dist(best, sys.distance(&fx, &fy));
        }
    }
    if matches!(mode.window, Window::TwoSided | Window::Backward) {
        let (mut bx, mut by) = (x.clone(), y.clone());
        for _ in 0..mode.n {
            bx = sys.backward(&bx);
            by = sys.backward(&by);
            best = max_dist(best, sys.distance(&bx, &by));
        }
    }
    best
}

/// Forward dynamical metric `max_{0≤k≤n} dist(f^k x, f^k y)`; works for
/// non-invertible maps.
pub fn forward_dyn_metric<S: MetricSystem>(
    sys: &S,
    x: &S::Point,
    y: &S::Point,
    n: u32,
) -> S::Dist {
    let mut best = sys.distance(x, y);
    let (mut fx, mut fy) = (x.clone(), y.clone());
    for _ in 0..n {
        fx = sys.forward(&fx);
        fy = sys.forward(&fy);
        best = max_dist(best, sys.distance(&fx, &fy));
    }
    best
}

/// `floor(log_λ(ξ / d))` for real-valued metrics, corrected so that the
/// defining inequalities `ξ/λ^(m+1) < d ≤ ξ/λ^m` hold.
pub(crate) fn real_scale_index(d: f64, xi: f64, lambda: f64) -> i32 {
    if d <= 0.0 {
        return i32::MAX;
    }
    let mut m = ((xi / d).ln() / lambda.ln()).floor() as i32;
    while d > xi / lambda.powi(m) {
        m -= 1;
    }
    while d <= xi / lambda.powi(m + 1) {
        m += 1;
    }
    m
}

pub(crate) fn real_deviation(observed: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        if observed == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (observed / expected - 1.0).abs()
    }
}
