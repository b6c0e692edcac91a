use serde::{Deserialize, Serialize};

use super::{SymbolicSystem, TransitionMatrix};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 1_000_000;

/// Perron root with right (`A v = ρ v`) and left (`u A = ρ u`) eigenvectors,
/// each normalised to unit sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub rho: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration stopped by the Collatz–Wielandt bracket
/// `min (Av)_i/v_i ≤ ρ ≤ max (Av)_i/v_i` closing to relative width 1e-13.
fn perron(apply: impl Fn(&[f64]) -> Vec<f64>, n: usize) -> Result<(f64, Vec<f64>, usize)> {
    let mut v = vec![1.0 / n as f64; n];
    for it in 1..=MAX_ITERATIONS {
        let w = apply(&v);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = w[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let total: f64 = w.iter().sum();
        if total == 0.0 || !total.is_finite() {
            return Err(Error::NoConvergence(it));
        }
        let next: Vec<f64> = w.iter().map(|x| x / total).collect();
        if hi - lo <= 1e-13 * hi {
            return Ok(((lo + hi) / 2.0, next, it));
        }
        v = next;
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

impl TransitionMatrix {
    pub fn spectrum(&self) -> Result<Spectrum> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        let n = self.size();
        let (rho, right, it_r) =
            perron(|v| (0..n).map(|i| self.successors(i).map(|j| v[j]).sum()).collect(), n)?;
        let (_, left, it_l) =
            perron(|u| (0..n).map(|j| self.predecessors(j).map(|i| u[i]).sum()).collect(), n)?;
        Ok(Spectrum { rho, right, left, iterations: it_r.max(it_l) })
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        self.spectrum().map(|s| s.rho)
    }
}

/// A cylinder `{x : x(start + k) = word[k]}`; `admissible` certifies that the
/// word is allowed by the matrix it was built against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub start: i64,
    pub word: Vec<u8>,
    pub admissible: bool,
}

impl Cylinder {
    pub fn new(m: &TransitionMatrix, start: i64, word: Vec<u8>) -> Self {
        let admissible = !word.is_empty() && m.admissible(&word);
        Self { start, word, admissible }
    }

    /// Index of the last fixed coordinate.
    pub fn last_index(&self) -> i64 {
        self.start + self.word.len() as i64 - 1
    }

    /// Admissible one-symbol extensions to the right; if `self` fixes the
    /// coordinates up to `m`, each child fixes them up to `m + 1`.
    pub fn unstable_children(&self, m: &TransitionMatrix) -> Vec<Cylinder> {
        if !self.admissible {
            return Vec::new();
        }
        let last = *self.word.last().unwrap() as usize;
        m.successors(last)
            .map(|a| {
                let mut w = self.word.clone();
                w.push(a as u8);
                Cylinder { start: self.start, word: w, admissible: true }
            })
            .collect()
    }

    /// Admissible one-symbol extensions to the left.
    pub fn stable_children(&self, m: &TransitionMatrix) -> Vec<Cylinder> {
        if !self.admissible {
            return Vec::new();
        }
        let first = self.word[0] as usize;
        m.predecessors(first)
            .map(|a| {
                let mut w = vec![a as u8];
                w.extend_from_slice(&self.word);
                Cylinder { start: self.start - 1, word: w, admissible: true }
            })
            .collect()
    }
}

/// The Markov measure with `p_ij = A_ij v_j / (ρ v_i)` and stationary vector
/// `π_i = u_i v_i`, where `u·v = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParryMeasure {
    matrix: TransitionMatrix,
    rho: f64,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl ParryMeasure {
    pub fn new(matrix: &TransitionMatrix) -> Result<Self> {
        let s = matrix.spectrum()?;
        let dot: f64 = s.left.iter().zip(&s.right).map(|(a, b)| a * b).sum();
        let u = s.left.iter().map(|x| x / dot).collect();
        Ok(Self { matrix: matrix.clone(), rho: s.rho, u, v: s.right })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn stationary(&self, i: usize) -> f64 {
        self.u[i] * self.v[i]
    }

    pub fn transition(&self, i: usize, j: usize) -> f64 {
        if self.matrix.allowed(i, j) {
            self.v[j] / (self.rho * self.v[i])
        } else {
            0.0
        }
    }

    /// Mass of the word's cylinder; shift invariance makes the start index
    /// irrelevant. Inadmissible words have mass zero.
    pub fn word_mass(&self, word: &[u8]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        if !self.matrix.admissible(word) {
            return 0.0;
        }
        let first = word[0] as usize;
        let last = word[word.len() - 1] as usize;
        self.u[first] * self.v[last] / self.rho.powi(word.len() as i32 - 1)
    }

    pub fn mass(&self, c: &Cylinder) -> f64 {
        if !c.admissible {
            return 0.0;
        }
        self.word_mass(&c.word)
    }
}

impl SymbolicSystem {
    pub fn spectrum(&self) -> Result<Spectrum> {
        self.matrix.spectrum()
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        self.matrix.spectral_radius()
    }

    pub fn parry(&self) -> Result<ParryMeasure> {
        ParryMeasure::new(&self.matrix)
    }

    pub fn parry_measure(&self, c: &Cylinder) -> Result<f64> {
        Ok(self.parry()?.mass(c))
    }

    pub fn enumerate_unstable_children(&self, c: &Cylinder) -> Vec<Cylinder> {
        c.unstable_children(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn perron_roots() {
        assert_relative_eq!(TransitionMatrix::full_shift(2).unwrap().spectral_radius().unwrap(), 2.0, epsilon = 1e-12);
        let gm = TransitionMatrix::golden_mean().spectrum().unwrap();
        assert!((gm.rho - PHI).abs() < 1e-12);
        assert!((gm.right[0] / gm.right[1] - PHI).abs() < 1e-10);
        assert_eq!(
            TransitionMatrix::new(vec![vec![1, 0], vec![0, 1]]).unwrap().spectral_radius(),
            Err(Error::NotPrimitive)
        );
    }

    #[test]
    fn golden_mean_parry_values() {
        let p = ParryMeasure::new(&TransitionMatrix::golden_mean()).unwrap();
        assert_relative_eq!(p.transition(0, 0), 1.0 / PHI, epsilon = 1e-12);
        assert_relative_eq!(p.transition(0, 1), 1.0 / (PHI * PHI), epsilon = 1e-12);
        assert_relative_eq!(p.transition(1, 0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.stationary(0), PHI * PHI / (1.0 + PHI * PHI), epsilon = 1e-12);
        assert_relative_eq!(p.word_mass(&[0]), p.stationary(0), epsilon = 1e-12);
        assert_eq!(p.word_mass(&[1, 1]), 0.0);
    }

    #[test]
    fn full_shift_uniform() {
        let p = ParryMeasure::new(&TransitionMatrix::full_shift(2).unwrap()).unwrap();
        assert_relative_eq!(p.word_mass(&[1]), 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.word_mass(&[1, 0, 1]), 0.125, epsilon = 1e-12);
    }

    #[test]
    fn children() {
        let gm = TransitionMatrix::golden_mean();
        let one = Cylinder::new(&gm, 0, vec![0, 1]);
        assert_eq!(one.unstable_children(&gm).len(), 1);
        let zero = Cylinder::new(&gm, 0, vec![1, 0]);
        assert_eq!(zero.unstable_children(&gm).len(), 2);
        let bad = Cylinder::new(&gm, 0, vec![1, 1]);
        assert!(!bad.admissible);
        assert!(bad.unstable_children(&gm).is_empty());
    }
}
