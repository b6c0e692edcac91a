use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Invertible, MetricSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Coincident,
    AboveExpansiveConstant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedPair {
    pub index: usize,
    pub distance: f64,
    pub reason: RejectReason,
}

/// Outcome of a self-similarity sweep. `deviations[i]` belongs to the
/// `i`-th accepted pair; `accepted[i]` is its index in the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub checked: usize,
    pub pass_count: usize,
    pub accepted: Vec<usize>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub worst_pair: Option<usize>,
    pub rejected: Vec<RejectedPair>,
    pub passed: bool,
}

enum Outcome {
    Deviation(f64),
    Rejected(f64, RejectReason),
}

fn classify<S: MetricSystem>(sys: &S, p: &S::Point, q: &S::Point) -> Result<S::Dist, Outcome> {
    let d = sys.distance(p, q);
    if sys.is_zero(d) {
        return Err(Outcome::Rejected(0.0, RejectReason::Coincident));
    }
    if d > sys.expansive_constant() {
        return Err(Outcome::Rejected(sys.real(d), RejectReason::AboveExpansiveConstant));
    }
    Ok(d)
}

fn assemble(outcomes: Vec<Outcome>, tol: f64) -> VerifyReport {
    let mut accepted = Vec::new();
    let mut deviations = Vec::new();
    let mut rejected = Vec::new();
    for (index, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Deviation(dev) => {
                accepted.push(index);
                deviations.push(dev);
            }
            Outcome::Rejected(distance, reason) => rejected.push(RejectedPair { index, distance, reason }),
        }
    }
    let mut worst_pair = None;
    let mut max_deviation = 0.0f64;
    for (k, &dev) in deviations.iter().enumerate() {
        if worst_pair.is_none() || dev > max_deviation || dev.is_nan() {
            max_deviation = dev;
            worst_pair = Some(accepted[k]);
        }
    }
    let pass_count = deviations.iter().filter(|&&d| d <= tol).count();
    VerifyReport {
        tolerance: tol,
        checked: deviations.len(),
        pass_count,
        passed: !deviations.is_empty() && pass_count == deviations.len(),
        accepted,
        deviations,
        max_deviation,
        worst_pair,
        rejected,
    }
}

/// Checks `max(dist(fp, fq), dist(f⁻¹p, f⁻¹q)) = λ·dist(p, q)` on every pair
/// with `0 < dist ≤ ξ`. Other pairs are listed in `rejected`, never skipped
/// silently. Output order matches input order regardless of scheduling.
pub fn verify_self_similar<S: Invertible>(
    sys: &S,
    pairs: &[(S::Point, S::Point)],
    tol: f64,
) -> VerifyReport {
    let outcomes: Vec<Outcome> = pairs
        .par_iter()
        .map(|(p, q)| match classify(sys, p, q) {
            Err(o) => o,
            Ok(d) => {
                let fwd = sys.distance(&sys.forward(p), &sys.forward(q));
                let bwd = sys.distance(&sys.backward(p), &sys.backward(q));
                let observed = if bwd > fwd { bwd } else { fwd };
                Outcome::Deviation(sys.deviation(observed, sys.scale(d, 1)))
            }
        })
        .collect();
    assemble(outcomes, tol)
}

/// One-sided variant for positively expansive maps:
/// `dist(fp, fq) = λ·dist(p, q)` for `0 < dist ≤ ξ`.
pub fn verify_forward_self_similar<S: MetricSystem>(
    sys: &S,
    pairs: &[(S::Point, S::Point)],
    tol: f64,
) -> VerifyReport {
    let outcomes: Vec<Outcome> = pairs
        .par_iter()
        .map(|(p, q)| match classify(sys, p, q) {
            Err(o) => o,
            Ok(d) => {
                let observed = sys.distance(&sys.forward(p), &sys.forward(q));
                Outcome::Deviation(sys.deviation(observed, sys.scale(d, 1)))
            }
        })
        .collect();
    assemble(outcomes, tol)
}
