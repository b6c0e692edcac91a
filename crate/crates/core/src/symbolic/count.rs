use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::SymbolicSystem;
use crate::dynamics::{DynMode, Window};
use crate::error::{Error, Result};

/// `m(ε) = min{m ≥ 0 : λ^(-m) < ε}`: every set of diameter `< ε` lies in one
/// central `(2m+1)`-cylinder, and distinct such cylinders are `≥ ε` apart.
/// Returns `None` when `ε > λ` (the whole space is one set).
pub fn strict_level(lambda: f64, eps: f64) -> Result<Option<u32>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::ScaleOutOfRange(format!("epsilon must be positive and finite, got {eps}")));
    }
    if eps > lambda {
        return Ok(None);
    }
    for m in 0..=100_000u32 {
        if lambda.powi(-(m as i32)) < eps {
            return Ok(Some(m));
        }
    }
    Err(Error::ScaleOutOfRange(format!("epsilon {eps} is below the representable range")))
}

impl SymbolicSystem {
    /// Number of admissible words of length `len` ending in each symbol.
    pub fn words_by_last(&self, len: usize) -> Vec<BigUint> {
        let n = self.matrix.size();
        if len == 0 {
            return vec![BigUint::zero(); n];
        }
        let mut v = vec![BigUint::one(); n];
        for _ in 1..len {
            v = (0..n)
                .map(|j| self.matrix.predecessors(j).fold(BigUint::zero(), |acc, i| acc + &v[i]))
                .collect();
        }
        v
    }

    /// Admissible words of length `len` (`1` for the empty word).
    pub fn count_words(&self, len: usize) -> BigUint {
        if len == 0 {
            return BigUint::one();
        }
        self.words_by_last(len).into_iter().sum()
    }

    /// Admissible words of length `len ≥ 1` whose first symbol is `first`.
    pub fn count_words_from(&self, first: usize, len: usize) -> BigUint {
        let n = self.matrix.size();
        let mut v: Vec<BigUint> = (0..n).map(|i| if i == first { BigUint::one() } else { BigUint::zero() }).collect();
        for _ in 1..len {
            v = (0..n)
                .map(|j| self.matrix.predecessors(j).fold(BigUint::zero(), |acc, i| acc + &v[i]))
                .collect();
        }
        v.into_iter().sum()
    }

    /// Admissible words of length `len ≥ 1` whose last symbol is `last`.
    pub fn count_words_to(&self, last: usize, len: usize) -> BigUint {
        let n = self.matrix.size();
        let mut v: Vec<BigUint> = (0..n).map(|i| if i == last { BigUint::one() } else { BigUint::zero() }).collect();
        for _ in 1..len {
            v = (0..n)
                .map(|i| self.matrix.successors(i).fold(BigUint::zero(), |acc, j| acc + &v[j]))
                .collect();
        }
        v.into_iter().sum()
    }

    /// Minimal number of sets of diameter `< ε` covering the whole space.
    pub fn exact_cov(&self, eps: f64) -> Result<BigUint> {
        Ok(match strict_level(self.lambda, eps)? {
            None => BigUint::one(),
            Some(m) => self.count_words(2 * m as usize + 1),
        })
    }

    /// Minimal cover of the whole space by sets of dynamical-metric diameter
    /// `< ε`: agreement on `[j-m, j+m]` for every `j` in the orbit window.
    pub fn dyn_cover_count(&self, eps: f64, mode: DynMode) -> Result<BigUint> {
        Ok(match strict_level(self.lambda, eps)? {
            None => BigUint::one(),
            Some(m) => {
                let n = mode.n as usize;
                let span = match mode.window {
                    Window::TwoSided => 2 * n,
                    Window::Forward | Window::Backward => n,
                };
                self.count_words(2 * m as usize + 1 + span)
            }
        })
    }

    /// `cov_ξ(M, d_k)` computed as the number of `steps`-step walks in the
    /// graph of admissible `(2r+1)`-blocks with `r = m(ξ)`, overlapping in
    /// `2r` symbols. `steps = 2k` for the two-sided metric, `k` for one-sided.
    /// Shares no code with [`SymbolicSystem::count_words`].
    pub fn block_walk_count(&self, steps: usize) -> BigUint {
        let r = strict_level(self.lambda, self.xi()).expect("xi is in range").expect("xi < lambda") as usize;
        let blocks = self.enumerate_blocks(2 * r + 1);
        let index: HashMap<&[u8], usize> = blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
        let succ: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| {
                (0..self.matrix.size() as u8)
                    .filter_map(|a| {
                        let mut next = b[1..].to_vec();
                        next.push(a);
                        index.get(next.as_slice()).copied()
                    })
                    .collect()
            })
            .collect();
        let mut counts = vec![BigUint::one(); blocks.len()];
        for _ in 0..steps {
            let mut next = vec![BigUint::zero(); blocks.len()];
            for (i, c) in counts.iter().enumerate() {
                for &j in &succ[i] {
                    next[j] += c;
                }
            }
            counts = next;
        }
        counts.into_iter().sum()
    }

    fn enumerate_blocks(&self, len: usize) -> Vec<Vec<u8>> {
        let mut words: Vec<Vec<u8>> = (0..self.matrix.size() as u8).map(|s| vec![s]).collect();
        for _ in 1..len {
            words = words
                .iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap() as usize;
                    self.matrix.successors(last).map(move |a| {
                        let mut v = w.clone();
                        v.push(a as u8);
                        v
                    })
                })
                .collect();
        }
        words
    }
}
