//! Subshifts of finite type with the λ-adic metric `dist(a, b) = λ^(-T(a,b))`,
//! where `T` is the largest `n` with `a(i) = b(i)` for all `|i| ≤ n`. Pairs
//! that already differ at index 0 are at the cap distance `λ`.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Invertible, MetricSystem, ProductStructure, SpaceKind};
use crate::error::{Error, Result};

mod count;
mod matrix;
mod parry;
mod sequence;

pub use count::strict_level;
pub use matrix::{TransitionMatrix, MAX_SYMBOLS};
pub use parry::{Cylinder, ParryMeasure, Spectrum};
pub use sequence::BiSequence;

/// A symbolic distance: `Zero` or `λ^(-level)`. `Level(-1)` is the cap `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymDist {
    Zero,
    Level(i32),
}

impl SymDist {
    pub const CAP: SymDist = SymDist::Level(-1);

    pub fn value(self, lambda: f64) -> f64 {
        match self {
            SymDist::Zero => 0.0,
            SymDist::Level(l) => lambda.powi(-l),
        }
    }

    /// Distance of two sequences whose first disagreement radius is `k`.
    pub fn from_radius(k: Option<u64>) -> Self {
        match k {
            None => SymDist::Zero,
            Some(k) => SymDist::Level(k as i32 - 1),
        }
    }
}

impl Ord for SymDist {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SymDist::Zero, SymDist::Zero) => Ordering::Equal,
            (SymDist::Zero, _) => Ordering::Less,
            (_, SymDist::Zero) => Ordering::Greater,
            (SymDist::Level(a), SymDist::Level(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for SymDist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The shift `σ(a)_n = a_{n+1}` on the admissible sequences of a transition
/// matrix, with expansive constant `ξ = λ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSystem {
    matrix: TransitionMatrix,
    lambda: f64,
}

impl SymbolicSystem {
    pub fn new(matrix: TransitionMatrix, lambda: f64) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(Self { matrix, lambda })
    }

    pub fn full_shift(symbols: usize, lambda: f64) -> Result<Self> {
        Self::new(TransitionMatrix::full_shift(symbols)?, lambda)
    }

    pub fn golden_mean(lambda: f64) -> Result<Self> {
        Self::new(TransitionMatrix::golden_mean(), lambda)
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn xi(&self) -> f64 {
        1.0 / self.lambda
    }

    pub fn check_point(&self, p: &BiSequence) -> Result<()> {
        if p.is_admissible(&self.matrix) {
            Ok(())
        } else {
            Err(Error::Inadmissible)
        }
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> BiSequence {
        BiSequence::random(&self.matrix, 6, rng)
    }

    /// A pair agreeing on `|i| ≤ level`, with a forced disagreement just
    /// outside whenever the matrix permits one.
    pub fn random_pair_at_level<R: Rng + ?Sized>(&self, level: u32, rng: &mut R) -> (BiSequence, BiSequence) {
        let half = level.max(6);
        let x = BiSequence::random(&self.matrix, half, rng);
        let t = level as i64;
        let y = x.resample_outside(&self.matrix, Some(-t), Some(t), true, rng);
        (x, y)
    }

    /// `y` shares the coordinates `i ≥ -level` with `x` (so `y ∈ W^s(x)`).
    pub fn random_stable_pair<R: Rng + ?Sized>(&self, level: u32, rng: &mut R) -> (BiSequence, BiSequence) {
        let x = BiSequence::random(&self.matrix, level.max(6), rng);
        let y = x.resample_outside(&self.matrix, Some(-(level as i64)), None, true, rng);
        (x, y)
    }

    /// `y` shares the coordinates `i ≤ level` with `x` (so `y ∈ W^u(x)`).
    pub fn random_unstable_pair<R: Rng + ?Sized>(&self, level: u32, rng: &mut R) -> (BiSequence, BiSequence) {
        let x = BiSequence::random(&self.matrix, level.max(6), rng);
        let y = x.resample_outside(&self.matrix, None, Some(level as i64), true, rng);
        (x, y)
    }

    /// `count` seeded pairs with levels drawn uniformly from `1..=max_level`;
    /// all have `dist ≤ ξ`, coincident pairs are possible but rare.
    pub fn sample_pairs(&self, count: usize, max_level: u32, seed: u64) -> Vec<(BiSequence, BiSequence)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let level = rng.random_range(1..=max_level.max(1));
                self.random_pair_at_level(level, &mut rng)
            })
            .collect()
    }
}

impl MetricSystem for SymbolicSystem {
    type Point = BiSequence;
    type Dist = SymDist;

    fn kind(&self) -> SpaceKind {
        SpaceKind::Symbolic
    }

    fn forward(&self, p: &BiSequence) -> BiSequence {
        p.shifted(1)
    }

    fn distance(&self, p: &BiSequence, q: &BiSequence) -> SymDist {
        SymDist::from_radius(p.first_disagreement(q))
    }

    fn real(&self, d: SymDist) -> f64 {
        d.value(self.lambda)
    }

    fn scale(&self, d: SymDist, k: i32) -> SymDist {
        match d {
            SymDist::Zero => SymDist::Zero,
            SymDist::Level(l) => SymDist::Level(l - k),
        }
    }

    fn deviation(&self, observed: SymDist, expected: SymDist) -> f64 {
        if observed == expected {
            0.0
        } else if expected == SymDist::Zero {
            f64::INFINITY
        } else {
            (self.real(observed) / self.real(expected) - 1.0).abs()
        }
    }

    fn scale_index(&self, d: SymDist) -> i32 {
        match d {
            SymDist::Zero => i32::MAX,
            SymDist::Level(l) => l - 1,
        }
    }

    fn expanding_factor(&self) -> f64 {
        self.lambda
    }

    fn expansive_constant(&self) -> SymDist {
        SymDist::Level(1)
    }

    fn diameter(&self) -> f64 {
        self.lambda
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn is_zero(&self, d: SymDist) -> bool {
        d == SymDist::Zero
    }
}

impl Invertible for SymbolicSystem {
    fn backward(&self, p: &BiSequence) -> BiSequence {
        p.shifted(-1)
    }
}

impl ProductStructure for SymbolicSystem {
    /// Splice: the future (`i ≥ 0`) of `x` with the past (`i < 0`) of `y`.
    /// Defined when `x(0) = y(0)`, which makes the junction admissible.
    fn bracket(&self, x: &BiSequence, y: &BiSequence) -> Result<BiSequence> {
        if x.at(0) != y.at(0) {
            return Err(Error::OutsideBracketDomain);
        }
        let z = BiSequence::splice(x, y);
        assert!(z.is_admissible(&self.matrix) || !(x.is_admissible(&self.matrix) && y.is_admissible(&self.matrix)));
        Ok(z)
    }
}
