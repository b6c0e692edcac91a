use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SYMBOLS: usize = 64;

/// A 0/1 transition matrix on at most 64 symbols, stored as row bitmasks.
/// Every symbol has at least one successor and one predecessor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct TransitionMatrix {
    n: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
    primitive: bool,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn bool_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|&row| {
            let mut acc = 0u64;
            let mut bits = row;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                acc |= b[j];
                bits &= bits - 1;
            }
            acc
        })
        .collect()
}

/// Some power `A^m` with `m ≤ N² − 2N + 2` is strictly positive.
fn primitive(rows: &[u64]) -> bool {
    let n = rows.len();
    let full = full_mask(n);
    let bound = n * n - 2 * n + 2;
    let mut power = rows.to_vec();
    for _ in 1..=bound.max(1) {
        if power.iter().all(|&r| r == full) {
            return true;
        }
        power = bool_mul(&power, rows);
    }
    false
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("matrix is empty".into()));
        }
        if n > MAX_SYMBOLS {
            return Err(Error::InvalidMatrix(format!("{n} symbols exceeds the limit of {MAX_SYMBOLS}")));
        }
        let mut masks = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!("row {i} has length {}, expected {n}", row.len())));
            }
            let mut mask = 0u64;
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => mask |= 1 << j,
                    other => {
                        return Err(Error::InvalidMatrix(format!("entry ({i},{j}) = {other} is not 0 or 1")))
                    }
                }
            }
            if mask == 0 {
                return Err(Error::InvalidMatrix(format!("row {i} is all zero; symbol {i} has no successor")));
            }
            masks.push(mask);
        }
        let cols: Vec<u64> = (0..n)
            .map(|j| masks.iter().enumerate().filter(|(_, &r)| r >> j & 1 == 1).fold(0u64, |acc, (i, _)| acc | 1 << i))
            .collect();
        if let Some(j) = cols.iter().position(|&c| c == 0) {
            return Err(Error::InvalidMatrix(format!("column {j} is all zero; symbol {j} has no predecessor")));
        }
        let primitive = primitive(&masks);
        Ok(Self { n, rows: masks, cols, primitive })
    }

    pub fn full_shift(n: usize) -> Result<Self> {
        Self::new(vec![vec![1; n]; n])
    }

    /// `[[1,1],[1,0]]`: the symbol 1 must be followed by 0.
    pub fn golden_mean() -> Self {
        Self::new(vec![vec![1, 1], vec![1, 0]]).expect("golden-mean matrix is valid")
    }

    /// A 4-symbol matrix whose shift is not transitive: symbols {0,1} form a
    /// repeller feeding the attractor {2,3}.
    pub fn repeller_attractor() -> Self {
        Self::new(vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1], vec![0, 0, 1, 1], vec![0, 0, 1, 1]])
            .expect("repeller/attractor matrix is valid")
    }

    /// Parses `[[0,1],[1,1]]`-style JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> =
            serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(format!("malformed JSON matrix: {e}")))?;
        Self::new(rows)
    }

    /// Parses whitespace-separated rows, one per line; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u8>()
                        .map_err(|_| Error::InvalidMatrix(format!("line {}: bad entry {t:?}", lineno + 1)))
                })
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    #[inline]
    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn col_mask(&self, j: usize) -> u64 {
        self.cols[j]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter(self.rows[i])
    }

    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter(self.cols[j])
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn in_degree(&self, j: usize) -> usize {
        self.cols[j].count_ones() as usize
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.allowed(i, j) as u8).collect()).collect()
    }

    /// Every consecutive pair of `word` is allowed.
    pub fn admissible(&self, word: &[u8]) -> bool {
        word.iter().all(|&s| (s as usize) < self.n) && word.windows(2).all(|w| self.allowed(w[0] as usize, w[1] as usize))
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let j = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(j)
    }
}

impl TryFrom<Vec<Vec<u8>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<TransitionMatrix> for Vec<Vec<u8>> {
    fn from(m: TransitionMatrix) -> Self {
        m.rows()
    }
}
