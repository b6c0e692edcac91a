use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TransitionMatrix;
use crate::error::{Error, Result};

/// An eventually periodic bi-infinite sequence.
///
/// Symbol `i` is `window[i - start]` for `start ≤ i < start + window.len()`,
/// `right[(i - end) mod |right|]` to the right of the window and
/// `left[(i - start) mod |left|]` to the left, so `left` is read left to right
/// and its last symbol sits at `start - 1`. Both tails are non-empty.
///
/// Equality is semantic: two representations are equal iff they describe the
/// same sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiSequence {
    left: Vec<u8>,
    window: Vec<u8>,
    start: i64,
    right: Vec<u8>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn minimal_period(word: &[u8]) -> usize {
    let n = word.len();
    (1..=n).find(|&p| n % p == 0 && word.iter().enumerate().all(|(i, &s)| s == word[i % p])).unwrap_or(n)
}

fn pick<R: Rng + ?Sized>(mask: u64, avoid: Option<u8>, rng: &mut R) -> u8 {
    let mut options = mask;
    if let Some(a) = avoid {
        let without = mask & !(1u64 << a);
        if without != 0 {
            options = without;
        }
    }
    let count = options.count_ones();
    let mut k = rng.random_range(0..count);
    let mut bits = options;
    loop {
        let j = bits.trailing_zeros();
        if k == 0 {
            return j as u8;
        }
        k -= 1;
        bits &= bits - 1;
    }
}

/// Random walk from `from` (exclusive) that ends in a cycle: returns the
/// transient part and the cycle, both in walking order. `avoid` is a symbol
/// to dodge at the first step when another choice exists.
fn walk_to_cycle<R: Rng + ?Sized>(
    from: u8,
    avoid: Option<u8>,
    free_steps: usize,
    next: impl Fn(usize) -> u64,
    rng: &mut R,
) -> (Vec<u8>, Vec<u8>) {
    let mut transient = Vec::new();
    let mut cur = from;
    for k in 0..free_steps {
        cur = pick(next(cur as usize), if k == 0 { avoid } else { None }, rng);
        transient.push(cur);
    }
    let mut seen: Vec<Option<usize>> = vec![None; 64];
    let mut tail = Vec::new();
    loop {
        cur = pick(next(cur as usize), if transient.is_empty() && tail.is_empty() { avoid } else { None }, rng);
        if let Some(pos) = seen[cur as usize] {
            let cycle = tail.split_off(pos);
            transient.extend(tail);
            return (transient, cycle);
        }
        seen[cur as usize] = Some(tail.len());
        tail.push(cur);
    }
}

impl BiSequence {
    pub fn new(left: Vec<u8>, window: Vec<u8>, start: i64, right: Vec<u8>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidArgument("tail periods must be non-empty".into()));
        }
        let mut s = Self { left, window, start, right };
        s.canonicalize();
        Ok(s)
    }

    /// Like [`BiSequence::new`] but also checks admissibility under `m`.
    pub fn admissible_new(m: &TransitionMatrix, left: Vec<u8>, window: Vec<u8>, start: i64, right: Vec<u8>) -> Result<Self> {
        let s = Self::new(left, window, start, right)?;
        if s.is_admissible(m) {
            Ok(s)
        } else {
            Err(Error::Inadmissible)
        }
    }

    /// The constant sequence `…sss…`.
    pub fn constant(s: u8) -> Self {
        Self { left: vec![s], window: Vec::new(), start: 0, right: vec![s] }
    }

    /// `…sss…` with `at(i) = t` for each `(i, t)` in `changes`.
    pub fn constant_with(s: u8, changes: &[(i64, u8)]) -> Self {
        if changes.is_empty() {
            return Self::constant(s);
        }
        let lo = changes.iter().map(|c| c.0).min().unwrap();
        let hi = changes.iter().map(|c| c.0).max().unwrap();
        let mut window = vec![s; (hi - lo + 1) as usize];
        for &(i, t) in changes {
            window[(i - lo) as usize] = t;
        }
        let mut out = Self { left: vec![s], window, start: lo, right: vec![s] };
        out.canonicalize();
        out
    }

    pub fn left(&self) -> &[u8] {
        &self.left
    }

    pub fn window(&self) -> &[u8] {
        &self.window
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.window.len() as i64
    }

    pub fn right(&self) -> &[u8] {
        &self.right
    }

    #[inline]
    pub fn at(&self, i: i64) -> u8 {
        let end = self.end();
        if i >= end {
            self.right[(i - end).rem_euclid(self.right.len() as i64) as usize]
        } else if i >= self.start {
            self.window[(i - self.start) as usize]
        } else {
            self.left[(i - self.start).rem_euclid(self.left.len() as i64) as usize]
        }
    }

    /// Symbols `at(lo..hi)`.
    pub fn word(&self, lo: i64, hi: i64) -> Vec<u8> {
        (lo..hi).map(|i| self.at(i)).collect()
    }

    /// `σᵏ`, with `σ(a)_n = a_{n+1}`.
    pub fn shifted(&self, k: i64) -> Self {
        Self { left: self.left.clone(), window: self.window.clone(), start: self.start - k, right: self.right.clone() }
    }

    /// Minimal tail periods and maximal absorption of the window into the tails.
    pub fn canonicalize(&mut self) {
        let pl = minimal_period(&self.left);
        self.left.truncate(pl);
        let pr = minimal_period(&self.right);
        self.right.truncate(pr);
        while let Some(&last) = self.window.last() {
            if last != *self.right.last().unwrap() {
                break;
            }
            self.window.pop();
            self.right.rotate_right(1);
        }
        while let Some(&first) = self.window.first() {
            if first != self.left[0] {
                break;
            }
            self.window.remove(0);
            self.start += 1;
            self.left.rotate_left(1);
        }
    }

    /// Representation with window exactly `[lo, hi)`; needs `lo ≤ start` and `hi ≥ end`.
    fn materialize(&self, lo: i64, hi: i64) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        debug_assert!(lo <= self.start && hi >= self.end());
        let pl = self.left.len() as i64;
        let pr = self.right.len() as i64;
        let left = (0..pl).map(|k| self.left[(k + lo - self.start).rem_euclid(pl) as usize]).collect();
        let right = (0..pr).map(|k| self.right[(k + hi - self.end()).rem_euclid(pr) as usize]).collect();
        (left, self.word(lo, hi), right)
    }

    pub fn is_admissible(&self, m: &TransitionMatrix) -> bool {
        let n = m.size();
        let ok = |w: &[u8]| w.iter().all(|&s| (s as usize) < n);
        if !(ok(&self.left) && ok(&self.right) && ok(&self.window)) {
            return false;
        }
        let cyclic = |w: &[u8]| m.admissible(w) && m.allowed(w[w.len() - 1] as usize, w[0] as usize);
        if !(cyclic(&self.left) && cyclic(&self.right) && m.admissible(&self.window)) {
            return false;
        }
        let l_last = *self.left.last().unwrap() as usize;
        match (self.window.first(), self.window.last()) {
            (Some(&f), Some(&l)) => m.allowed(l_last, f as usize) && m.allowed(l as usize, self.right[0] as usize),
            _ => m.allowed(l_last, self.right[0] as usize),
        }
    }

    /// Smallest `k ≥ 0` with `a(k) ≠ b(k)` or `a(-k) ≠ b(-k)`; `None` when the
    /// sequences coincide.
    pub fn first_disagreement(&self, other: &Self) -> Option<u64> {
        let h_right = self.end().max(other.end()).max(0) as u64
            + lcm(self.right.len() as u64, other.right.len() as u64);
        let h_left = (-self.start.min(other.start)).max(0) as u64 + lcm(self.left.len() as u64, other.left.len() as u64);
        let horizon = h_right.max(h_left);
        for k in 0..=horizon {
            let i = k as i64;
            if k < h_right && self.at(i) != other.at(i) {
                return Some(k);
            }
            if k >= 1 && k <= h_left && self.at(-i) != other.at(-i) {
                return Some(k);
            }
        }
        None
    }

    /// First index `i ≥ from` where the sequences differ, scanning rightward.
    pub fn first_difference_right(&self, other: &Self, from: i64) -> Option<i64> {
        let h = self.end().max(other.end()).max(from) + lcm(self.right.len() as u64, other.right.len() as u64) as i64;
        (from..h).find(|&i| self.at(i) != other.at(i))
    }

    /// First index `i ≤ from` where the sequences differ, scanning leftward.
    pub fn first_difference_left(&self, other: &Self, from: i64) -> Option<i64> {
        let h = self.start.min(other.start).min(from) - lcm(self.left.len() as u64, other.left.len() as u64) as i64;
        (h..=from).rev().find(|&i| self.at(i) != other.at(i))
    }

    /// `z(i) = future(i)` for `i ≥ 0`, `z(i) = past(i)` for `i < 0`.
    pub fn splice(future: &Self, past: &Self) -> Self {
        let lo = future.start.min(past.start).min(-1);
        let hi = future.end().max(past.end()).max(1);
        let (left, pw, _) = past.materialize(lo, hi);
        let (_, fw, right) = future.materialize(lo, hi);
        let cut = (-lo) as usize;
        let mut window = pw[..cut].to_vec();
        window.extend_from_slice(&fw[cut..]);
        let mut z = Self { left, window, start: lo, right };
        z.canonicalize();
        z
    }

    /// A random admissible sequence whose window spans at least `[-half_width, half_width]`.
    pub fn random<R: Rng + ?Sized>(m: &TransitionMatrix, half_width: u32, rng: &mut R) -> Self {
        let n = m.size();
        let lo = -(half_width as i64);
        let mut window = vec![rng.random_range(0..n) as u8];
        for _ in 0..2 * half_width {
            let cur = *window.last().unwrap();
            window.push(pick(m.row_mask(cur as usize), None, rng));
        }
        let seq = Self { left: vec![window[0]], window: window.clone(), start: lo, right: vec![0] };
        seq.resample_outside(m, Some(lo), Some(lo + 2 * half_width as i64), false, rng)
    }

    /// Keeps `at(i)` for `lo ≤ i ≤ hi` (an absent bound keeps that whole side)
    /// and resamples the rest as random admissible continuations. With
    /// `force`, the first resampled symbol on each side differs from the
    /// original whenever the matrix allows it.
    pub fn resample_outside<R: Rng + ?Sized>(
        &self,
        m: &TransitionMatrix,
        lo: Option<i64>,
        hi: Option<i64>,
        force: bool,
        rng: &mut R,
    ) -> Self {
        let (a, b) = match (lo, hi) {
            (None, None) => return self.clone(),
            (Some(l), Some(h)) => (l, h.max(l) + 1),
            (Some(l), None) => (l, self.end().max(l + 1)),
            (None, Some(h)) => (self.start.min(h), h + 1),
        };
        let mut window = self.word(a, b);
        let mut start = a;
        let right = if hi.is_some() {
            let avoid = force.then(|| self.at(b));
            let free = rng.random_range(0..6);
            let (transient, cycle) = walk_to_cycle(window[window.len() - 1], avoid, free, |s| m.row_mask(s), rng);
            window.extend(transient);
            cycle
        } else {
            let pr = self.right.len() as i64;
            (0..pr).map(|k| self.right[(k + b - self.end()).rem_euclid(pr) as usize]).collect()
        };
        let left = if lo.is_some() {
            let avoid = force.then(|| self.at(a - 1));
            let free = rng.random_range(0..6);
            let (transient, cycle) = walk_to_cycle(window[0], avoid, free, |s| m.col_mask(s), rng);
            start -= transient.len() as i64;
            let mut w: Vec<u8> = transient.into_iter().rev().collect();
            w.extend(window);
            window = w;
            cycle.into_iter().rev().collect()
        } else {
            let pl = self.left.len() as i64;
            (0..pl).map(|k| self.left[(k + a - self.start).rem_euclid(pl) as usize]).collect()
        };
        let mut out = Self { left, window, start, right };
        out.canonicalize();
        debug_assert!(out.is_admissible(m));
        out
    }
}

impl PartialEq for BiSequence {
    fn eq(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }
}

impl Eq for BiSequence {}

impl fmt::Display for BiSequence {
    /// `(L)^ w₋ . w₊ (R)^` with the dot just left of index 0.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.start.min(0);
        let hi = self.end().max(0);
        let (left, w, right) = self.materialize(lo, hi);
        let join = |v: &[u8]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("");
        let cut = (-lo) as usize;
        write!(f, "({})^ {}.{} ({})^", join(&left), join(&w[..cut]), join(&w[cut..]), join(&right))
    }
}
