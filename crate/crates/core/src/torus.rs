//! Hyperbolic 2×2 integer automorphisms of the torus `R²/Z²` with the
//! eigen-coordinate metric `ρ(v) = max(|s|^e_s, |u|^e_u)`, where
//! `e_s = ln λ / ln(1/|a|)` and `e_u = ln λ / ln |b|` for the stable and
//! unstable eigenvalues `a`, `b`.
//!
//! Points carry double-double coordinates so that orbit differences keep
//! their relative accuracy after many expanding steps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{real_deviation, real_scale_index, verify_self_similar, Invertible, MetricSystem, ProductStructure, SpaceKind};
use crate::error::{Error, Result};

pub const DEFAULT_XI: f64 = 0.05;
const VALIDATION_PAIRS: usize = 10_000;
const VALIDATION_TOL: f64 = 1e-9;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// A torus point as an unevaluated sum `hi + lo` per coordinate, normalised
/// so that `0 ≤ hi + lo < 1` and `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    hi: [f64; 2],
    lo: [f64; 2],
}

/// Normalises `hi + lo` into `[0, 1)` exactly. `hi` may equal `1.0` when
/// `lo < 0` carries the value just below one.
fn reduce(hi: f64, lo: f64) -> (f64, f64) {
    let shift = |h: f64, l: f64, by: f64| {
        let (s, e) = two_sum(h, by);
        two_sum(s, l + e)
    };
    let (h, l) = two_sum(hi, lo);
    let (h, l) = shift(h, l, -h.floor());
    if h < 0.0 || (h == 0.0 && l < 0.0) {
        shift(h, l, 1.0)
    } else {
        (h, l)
    }
}

/// `x - round(x)` for a double-double, evaluated to `f64`.
fn centered(hi: f64, lo: f64) -> f64 {
    let r = (hi + lo).round();
    let (s, e) = two_sum(hi, -r);
    s + (e + lo)
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        let (h0, l0) = reduce(x, 0.0);
        let (h1, l1) = reduce(y, 0.0);
        Self { hi: [h0, h1], lo: [l0, l1] }
    }

    /// Coordinates rounded to `f64`, kept inside `[0, 1)`.
    pub fn coords(&self) -> [f64; 2] {
        let below_one = 1.0 - f64::EPSILON / 2.0;
        [(self.hi[0] + self.lo[0]).min(below_one), (self.hi[1] + self.lo[1]).min(below_one)]
    }

    /// The point translated by a small ambient vector.
    pub fn offset(&self, v: [f64; 2]) -> Self {
        let mut out = *self;
        for i in 0..2 {
            let (s, e) = two_sum(self.hi[i], v[i]);
            (out.hi[i], out.lo[i]) = reduce(s, e + self.lo[i]);
        }
        out
    }

    /// Representative of `other - self` in `[-1/2, 1/2]²`.
    pub fn delta(&self, other: &Self) -> [f64; 2] {
        let mut d = [0.0; 2];
        for i in 0..2 {
            let (s, e) = two_sum(other.hi[i], -self.hi[i]);
            d[i] = centered(s, e + (other.lo[i] - self.lo[i]));
        }
        d
    }

    fn apply(&self, m: &[[i64; 2]; 2]) -> Self {
        let mut out = *self;
        for (i, row) in m.iter().enumerate() {
            let (mut h, mut l) = (0.0, 0.0);
            for j in 0..2 {
                let k = row[j] as f64;
                let p = k * self.hi[j];
                let err = k.mul_add(self.hi[j], -p);
                let (s, e) = two_sum(h, p);
                h = s;
                l += e + err + k * self.lo[j];
            }
            (out.hi[i], out.lo[i]) = reduce(h, l);
        }
        out
    }
}

/// Coordinates in the unit eigenbasis: `v = s·e_s + u·e_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuCoords {
    pub s: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToralSystem {
    matrix: [[i64; 2]; 2],
    inverse: [[i64; 2]; 2],
    a: f64,
    b: f64,
    e_stable: [f64; 2],
    e_unstable: [f64; 2],
    /// Rows of the inverse of the basis matrix `[e_s e_u]`.
    to_su: [[f64; 2]; 2],
    lambda: f64,
    exp_s: f64,
    exp_u: f64,
    xi: f64,
    injectivity: f64,
    diameter: f64,
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    let s = if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) { -1.0 } else { 1.0 };
    [s * v[0] / n, s * v[1] / n]
}

impl ToralSystem {
    /// The cat map `[[2,1],[1,1]]` at its supremal factor `(3+√5)/2`.
    pub fn cat_map() -> Self {
        Self::new([[2, 1], [1, 1]], None).expect("cat map is hyperbolic")
    }

    pub fn new(matrix: [[i64; 2]; 2], lambda: Option<f64>) -> Result<Self> {
        Self::with_xi(matrix, lambda, DEFAULT_XI)
    }

    /// Builds the system and validates `ξ` with a seeded sweep of
    /// self-similarity checks at distances up to `ξ`.
    pub fn with_xi(matrix: [[i64; 2]; 2], lambda: Option<f64>, xi: f64) -> Result<Self> {
        let sys = Self::unvalidated(matrix, lambda, xi)?;
        let per = VALIDATION_PAIRS / 4;
        let mut pairs = Vec::with_capacity(VALIDATION_PAIRS);
        for (k, scale) in [xi * (1.0 - 1e-9), xi / 4.0, xi / 64.0, xi * 1e-4].into_iter().enumerate() {
            pairs.extend(sys.sample_pairs(scale, per, 0x5eed + k as u64)?);
        }
        let report = verify_self_similar(&sys, &pairs, VALIDATION_TOL);
        if !report.passed || !report.rejected.is_empty() {
            return Err(Error::Validation(format!(
                "xi = {xi}: max deviation {:.3e} over {} pairs ({} rejected)",
                report.max_deviation,
                report.checked,
                report.rejected.len()
            )));
        }
        Ok(sys)
    }

    /// Construction without the validation sweep; still checks hyperbolicity,
    /// the range of `λ` and the injectivity margin.
    pub fn unvalidated(matrix: [[i64; 2]; 2], lambda: Option<f64>, xi: f64) -> Result<Self> {
        let [[p, q], [r, s]] = matrix;
        let det = p * s - q * r;
        if det != 1 && det != -1 {
            return Err(Error::NotHyperbolic(format!("determinant {det} is not ±1")));
        }
        let tr = (p + s) as f64;
        let disc = tr * tr - 4.0 * det as f64;
        if disc <= 0.0 {
            return Err(Error::NotHyperbolic("eigenvalues are not real and distinct".into()));
        }
        let sq = disc.sqrt();
        let (l1, l2) = ((tr + sq) / 2.0, (tr - sq) / 2.0);
        let (b, a) = if l1.abs() > l2.abs() { (l1, l2) } else { (l2, l1) };
        if (b.abs() - 1.0).abs() < 1e-12 || (a.abs() - 1.0).abs() < 1e-12 {
            return Err(Error::NotHyperbolic("an eigenvalue lies on the unit circle".into()));
        }
        let eigvec = |mu: f64| -> [f64; 2] {
            if q != 0 {
                unit([q as f64, mu - p as f64])
            } else {
                unit([mu - s as f64, r as f64])
            }
        };
        let e_stable = eigvec(a);
        let e_unstable = eigvec(b);
        let basis_det = e_stable[0] * e_unstable[1] - e_unstable[0] * e_stable[1];
        let to_su = [
            [e_unstable[1] / basis_det, -e_unstable[0] / basis_det],
            [-e_stable[1] / basis_det, e_stable[0] / basis_det],
        ];
        let sup = (1.0 / a.abs()).min(b.abs());
        let lambda = lambda.unwrap_or(sup);
        if !(lambda > 1.0) || lambda > sup * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} outside (1, {sup}]")));
        }
        let inverse = [[s * det, -q * det], [-r * det, p * det]];
        let mut sys = Self {
            matrix,
            inverse,
            a,
            b,
            e_stable,
            e_unstable,
            to_su,
            lambda,
            exp_s: lambda.ln() / (1.0 / a.abs()).ln(),
            exp_u: lambda.ln() / b.abs().ln(),
            xi,
            injectivity: 0.0,
            diameter: 0.0,
        };
        let mut shortest = f64::INFINITY;
        for i in -4i32..=4 {
            for j in -4i32..=4 {
                if i != 0 || j != 0 {
                    shortest = shortest.min(sys.rho([i as f64, j as f64]));
                }
            }
        }
        sys.injectivity = shortest / 2.0;
        if !(xi > 0.0) || xi >= sys.injectivity / 4.0 {
            return Err(Error::InvalidArgument(format!(
                "xi = {xi} must lie in (0, {:.4}), a quarter of the injectivity scale",
                sys.injectivity / 4.0
            )));
        }
        sys.diameter = sys.estimate_diameter();
        Ok(sys)
    }

    /// Largest distance from the origin over a 257×257 grid of the
    /// fundamental domain, inflated by the grid's local oscillation.
    fn estimate_diameter(&self) -> f64 {
        let n = 256;
        let h = 1.0 / n as f64;
        let mut best = 0.0f64;
        for i in 0..=n {
            for j in 0..=n {
                best = best.max(self.rho_min([i as f64 * h - 0.5, j as f64 * h - 0.5]));
            }
        }
        best + self.rho([h, h]).max(self.rho([h, -h]))
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn stable_eigenvalue(&self) -> f64 {
        self.a
    }

    pub fn unstable_eigenvalue(&self) -> f64 {
        self.b
    }

    pub fn stable_vector(&self) -> [f64; 2] {
        self.e_stable
    }

    pub fn unstable_vector(&self) -> [f64; 2] {
        self.e_unstable
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.exp_s, self.exp_u)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Half the shortest lattice vector under `ρ`.
    pub fn injectivity_scale(&self) -> f64 {
        self.injectivity
    }

    pub fn su_split(&self, v: [f64; 2]) -> SuCoords {
        SuCoords {
            s: self.to_su[0][0] * v[0] + self.to_su[0][1] * v[1],
            u: self.to_su[1][0] * v[0] + self.to_su[1][1] * v[1],
        }
    }

    pub fn from_su(&self, c: SuCoords) -> [f64; 2] {
        [
            c.s * self.e_stable[0] + c.u * self.e_unstable[0],
            c.s * self.e_stable[1] + c.u * self.e_unstable[1],
        ]
    }

    /// `ρ(v) = max(|s|^e_s, |u|^e_u)` on an ambient vector.
    pub fn rho(&self, v: [f64; 2]) -> f64 {
        let c = self.su_split(v);
        self.rho_su(c)
    }

    pub fn rho_su(&self, c: SuCoords) -> f64 {
        c.s.abs().powf(self.exp_s).max(c.u.abs().powf(self.exp_u))
    }

    /// `min_w ρ(v + w)` over the 3×3 block of lattice translates.
    fn rho_min(&self, v: [f64; 2]) -> f64 {
        let mut best = f64::INFINITY;
        for i in -1..=1 {
            for j in -1..=1 {
                best = best.min(self.rho([v[0] + i as f64, v[1] + j as f64]));
            }
        }
        best
    }

    /// The difference `y - x` as the translate minimising `ρ`.
    pub fn min_delta(&self, x: &TorusPoint, y: &TorusPoint) -> [f64; 2] {
        let d = x.delta(y);
        let mut best = (f64::INFINITY, d);
        for i in -1..=1 {
            for j in -1..=1 {
                let v = [d[0] + i as f64, d[1] + j as f64];
                let r = self.rho(v);
                if r < best.0 {
                    best = (r, v);
                }
            }
        }
        best.1
    }

    pub fn apply(&self, x: &TorusPoint) -> TorusPoint {
        x.apply(&self.matrix)
    }

    pub fn apply_inv(&self, x: &TorusPoint) -> TorusPoint {
        x.apply(&self.inverse)
    }

    /// Seeded pairs with `dist ∈ [scale/2, scale]`, cycling through eight
    /// strata: pure stable, pure unstable, and mixtures where the stable
    /// (even strata) or unstable (odd strata) coordinate realises the distance.
    pub fn sample_pairs(&self, scale: f64, count: usize, seed: u64) -> Result<Vec<(TorusPoint, TorusPoint)>> {
        if !(scale > 0.0) || scale > self.xi {
            return Err(Error::ScaleOutOfRange(format!("scale {scale} must lie in (0, xi = {}]", self.xi)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut k = 0usize;
        while out.len() < count {
            let x = TorusPoint::new(rng.random::<f64>(), rng.random::<f64>());
            let d = scale * rng.random_range(0.5..1.0);
            let other = match k % 8 {
                0 | 1 => 0.0,
                _ => d * rng.random::<f64>(),
            };
            let (rs, ru) = if k % 2 == 0 { (d, other) } else { (other, d) };
            let sign = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1.0 } else { -1.0 };
            let c = SuCoords { s: sign(&mut rng) * rs.powf(1.0 / self.exp_s), u: sign(&mut rng) * ru.powf(1.0 / self.exp_u) };
            let y = x.offset(self.from_su(c));
            let dist = self.distance(&x, &y);
            if dist >= scale / 2.0 && dist <= scale {
                out.push((x, y));
                k += 1;
            }
        }
        Ok(out)
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> TorusPoint {
        TorusPoint::new(rng.random::<f64>(), rng.random::<f64>())
    }
}

impl MetricSystem for ToralSystem {
    type Point = TorusPoint;
    type Dist = f64;

    fn kind(&self) -> SpaceKind {
        SpaceKind::Toral
    }

    fn forward(&self, p: &TorusPoint) -> TorusPoint {
        self.apply(p)
    }

    fn distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        self.rho(self.min_delta(p, q))
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
        self.diameter
    }

    fn tolerance(&self) -> f64 {
        VALIDATION_TOL
    }
}

impl Invertible for ToralSystem {
    fn backward(&self, p: &TorusPoint) -> TorusPoint {
        self.apply_inv(p)
    }
}

impl ProductStructure for ToralSystem {
    /// `x + stable(y - x)`: on the stable line of `x` and the unstable line of `y`.
    fn bracket(&self, x: &TorusPoint, y: &TorusPoint) -> Result<TorusPoint> {
        if !(self.distance(x, y) < self.xi) {
            return Err(Error::OutsideBracketDomain);
        }
        let c = self.su_split(self.min_delta(x, y));
        Ok(x.offset(self.from_su(SuCoords { s: c.s, u: 0.0 })))
    }
}

/// The dynamics of a [`ToralSystem`] with the flat metric
/// `min_w |y - x + w|₂`. Adapted but not self-similar; used as a base for
/// the sup-refinement.
#[derive(Debug, Clone)]
pub struct EuclideanToral {
    inner: ToralSystem,
    xi: f64,
}

impl EuclideanToral {
    pub fn new(inner: ToralSystem, xi: f64) -> Self {
        Self { inner, xi }
    }

    pub fn inner(&self) -> &ToralSystem {
        &self.inner
    }
}

impl MetricSystem for EuclideanToral {
    type Point = TorusPoint;
    type Dist = f64;

    fn kind(&self) -> SpaceKind {
        SpaceKind::WrappedBaseMetric
    }

    fn forward(&self, p: &TorusPoint) -> TorusPoint {
        self.inner.apply(p)
    }

    fn distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        let d = p.delta(q);
        d[0].hypot(d[1])
    }

    fn real(&self, d: f64) -> f64 {
        d
    }

    fn scale(&self, d: f64, k: i32) -> f64 {
        d * self.expanding_factor().powi(k)
    }

    fn deviation(&self, observed: f64, expected: f64) -> f64 {
        real_deviation(observed, expected)
    }

    fn scale_index(&self, d: f64) -> i32 {
        real_scale_index(d, self.xi, self.expanding_factor())
    }

    fn expanding_factor(&self) -> f64 {
        self.inner.b.abs()
    }

    fn expansive_constant(&self) -> f64 {
        self.xi
    }

    fn diameter(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    fn tolerance(&self) -> f64 {
        1e-12
    }
}

impl Invertible for EuclideanToral {
    fn backward(&self, p: &TorusPoint) -> TorusPoint {
        self.inner.apply_inv(p)
    }
}

impl ProductStructure for EuclideanToral {
    fn bracket(&self, x: &TorusPoint, y: &TorusPoint) -> Result<TorusPoint> {
        self.inner.bracket(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn cat_map_constants() {
        let t = ToralSystem::cat_map();
        assert_relative_eq!(t.lambda(), (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-12);
        let (es, eu) = t.exponents();
        assert_relative_eq!(es, 1.0, epsilon = 1e-12);
        assert_relative_eq!(eu, 1.0, epsilon = 1e-12);
        assert!(t.xi() < t.injectivity_scale() / 4.0);
    }

    #[test]
    fn half_lambda_exponents() {
        let t = ToralSystem::new([[2, 1], [1, 1]], Some(((3.0 + 5f64.sqrt()) / 2.0).sqrt())).unwrap();
        let (es, eu) = t.exponents();
        assert_relative_eq!(es, 0.5, epsilon = 1e-12);
        assert_relative_eq!(eu, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_matrices_and_lambda() {
        assert!(matches!(ToralSystem::new([[1, 1], [0, 1]], None), Err(Error::NotHyperbolic(_))));
        assert!(matches!(ToralSystem::new([[2, 0], [0, 1]], None), Err(Error::NotHyperbolic(_))));
        assert!(ToralSystem::new([[2, 1], [1, 1]], Some(3.0)).is_err());
        assert!(ToralSystem::new([[2, 1], [1, 1]], Some(1.0)).is_err());
    }

    #[test]
    fn su_split_example() {
        let t = ToralSystem::cat_map();
        let c = t.su_split([0.01, 0.0]);
        assert_relative_eq!(c.s.abs(), 0.01 / (1.0 + PHI * PHI).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(c.u.abs(), 0.01 / (1.0 + 1.0 / (PHI * PHI)).sqrt(), epsilon = 1e-15);
        let e = t.su_split(t.unstable_vector());
        assert!(e.s.abs() < 1e-15);
        assert_relative_eq!(e.u, 1.0, epsilon = 1e-15);
        assert_eq!(t.su_split([0.0, 0.0]), SuCoords { s: 0.0, u: 0.0 });
    }

    #[test]
    fn apply_examples() {
        let t = ToralSystem::cat_map();
        assert_eq!(t.apply(&TorusPoint::new(0.0, 0.0)).coords(), [0.0, 0.0]);
        assert_eq!(t.apply(&TorusPoint::new(0.5, 0.5)).coords(), [0.5, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = t.random_point(&mut rng);
            let back = t.apply_inv(&t.apply(&x));
            let d = x.delta(&back);
            assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12);
        }
    }

    #[test]
    fn double_double_keeps_small_differences() {
        let t = ToralSystem::cat_map();
        let x = TorusPoint::new(0.3, 0.7);
        let v = t.from_su(SuCoords { s: 1e-9, u: 0.0 });
        let mut a = x;
        let mut b = x.offset(v);
        for n in 1..=12 {
            a = t.apply(&a);
            b = t.apply(&b);
            let d = t.distance(&a, &b);
            assert_relative_eq!(d * t.lambda().powi(n), 1e-9, max_relative = 1e-12);
        }
    }

    #[test]
    fn bracket_lands_on_both_leaves() {
        let t = ToralSystem::cat_map();
        let x = TorusPoint::new(0.0, 0.0);
        let y = x.offset([0.001 * t.stable_vector()[0], 0.001 * t.stable_vector()[1]]);
        let z = t.bracket(&x, &y).unwrap();
        assert!(t.distance(&z, &y) < 1e-15);
        let z2 = t.bracket(&y, &x).unwrap();
        assert!(t.distance(&z2, &x) < 1e-15);
    }

    #[test]
    fn sample_pairs_contract() {
        let t = ToralSystem::cat_map();
        let a = t.sample_pairs(1e-3, 100, 7).unwrap();
        assert_eq!(a.len(), 100);
        for (x, y) in &a {
            let d = t.distance(x, y);
            assert!((5e-4..=1e-3).contains(&d));
        }
        assert_eq!(a, t.sample_pairs(1e-3, 100, 7).unwrap());
        assert!(t.sample_pairs(0.05, 10, 7).is_ok());
        assert!(t.sample_pairs(0.06, 10, 7).is_err());
    }
}
