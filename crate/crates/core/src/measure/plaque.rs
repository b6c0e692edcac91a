use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{BiSequence, SymbolicSystem, TransitionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaqueKind {
    Stable,
    Unstable,
}

/// A local stable or unstable set of a symbolic point. The unstable plaque
/// at level `q` is `{y : y(i) = x(i) for i ≤ q}`; the stable plaque at level
/// `p` is `{y : y(i) = x(i) for i ≥ −p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plaque {
    pub kind: PlaqueKind,
    pub anchor: BiSequence,
    pub level: i64,
}

impl Plaque {
    pub fn unstable(anchor: BiSequence, level: i64) -> Self {
        Self { kind: PlaqueKind::Unstable, anchor, level }
    }

    pub fn stable(anchor: BiSequence, level: i64) -> Self {
        Self { kind: PlaqueKind::Stable, anchor, level }
    }

    /// The fixed coordinate next to the free side.
    pub fn boundary_symbol(&self) -> u8 {
        match self.kind {
            PlaqueKind::Unstable => self.anchor.at(self.level),
            PlaqueKind::Stable => self.anchor.at(-self.level),
        }
    }

    /// The set `f(P)`: the plaque of `f(x)` one level coarser (unstable) or
    /// finer (stable).
    pub fn image(&self) -> Plaque {
        let level = match self.kind {
            PlaqueKind::Unstable => self.level - 1,
            PlaqueKind::Stable => self.level + 1,
        };
        Plaque { kind: self.kind, anchor: self.anchor.shifted(1), level }
    }

    pub fn preimage(&self) -> Plaque {
        let level = match self.kind {
            PlaqueKind::Unstable => self.level + 1,
            PlaqueKind::Stable => self.level - 1,
        };
        Plaque { kind: self.kind, anchor: self.anchor.shifted(-1), level }
    }
}

/// Number of steps with a unique admissible continuation from `a` in the
/// free direction; `None` if the forced chain never branches.
fn forced_steps(m: &TransitionMatrix, kind: PlaqueKind, a: usize) -> Option<i64> {
    let mut cur = a;
    for steps in 0..=m.size() as i64 {
        let mut next = match kind {
            PlaqueKind::Unstable => m.successors(cur).collect::<Vec<_>>(),
            PlaqueKind::Stable => m.predecessors(cur).collect::<Vec<_>>(),
        };
        if next.len() != 1 {
            return Some(steps);
        }
        cur = next.pop().unwrap();
    }
    None
}

/// Diameter of a cylinder node fixing everything up to distance `level` on
/// the free side and ending in `a`.
fn node_diameter(sys: &SymbolicSystem, kind: PlaqueKind, level: i64, a: usize) -> f64 {
    match forced_steps(sys.matrix(), kind, a) {
        None => 0.0,
        Some(f) => sys.lambda().powi(-((level + f).max(-1) as i32)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureMethod {
    CylinderDp,
}

/// `μ^d_r` of a plaque via the cylinder dynamic program
/// `m(w) = min(diam(w)^d, Σ_a m(w·a))`, leaves at depth `D` valued `diam^d`.
/// Node values depend only on depth and boundary symbol, so they are stored
/// as `values[k][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureTree {
    pub method: MeasureMethod,
    pub kind: PlaqueKind,
    pub level: i64,
    pub root_symbol: u8,
    pub d: f64,
    pub depth: u32,
    pub values: Vec<Vec<f64>>,
    pub diameters: Vec<Vec<f64>>,
    pub root: f64,
    /// Leaf diameter bound `r(D)`.
    pub resolution: f64,
    /// Root value at depth `D + 2`.
    pub root_plus2: f64,
    pub drift: f64,
    pub converged: bool,
    /// Root values for depths `0..=D+2` never increase.
    pub monotone: bool,
}

/// Relative drift threshold between depths `D` and `D + 2`.
pub const CONVERGENCE_DRIFT: f64 = 0.01;

fn dp_tables(sys: &SymbolicSystem, kind: PlaqueKind, level: i64, d: f64, depth: u32) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let m = sys.matrix();
    let n = m.size();
    let diam: Vec<Vec<f64>> =
        (0..=depth as i64).map(|k| (0..n).map(|a| node_diameter(sys, kind, level + k, a)).collect()).collect();
    let mut values = vec![vec![0.0; n]; depth as usize + 1];
    values[depth as usize] = diam[depth as usize].iter().map(|r| r.powf(d)).collect();
    for k in (0..depth as usize).rev() {
        for a in 0..n {
            let children: f64 = match kind {
                PlaqueKind::Unstable => m.successors(a).map(|b| values[k + 1][b]).sum(),
                PlaqueKind::Stable => m.predecessors(a).map(|b| values[k + 1][b]).sum(),
            };
            values[k][a] = diam[k][a].powf(d).min(children);
        }
    }
    (values, diam)
}

fn root_value(sys: &SymbolicSystem, kind: PlaqueKind, level: i64, a: usize, d: f64, depth: u32) -> f64 {
    dp_tables(sys, kind, level, d, depth).0[0][a]
}

pub fn hausdorff_estimate(sys: &SymbolicSystem, plaque: &Plaque, d: f64, depth: u32) -> Result<MeasureTree> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent d must be positive, got {d}")));
    }
    if !sys.matrix().is_primitive() {
        return Err(Error::NotPrimitive);
    }
    sys.check_point(&plaque.anchor)?;
    let a = plaque.boundary_symbol() as usize;
    let (values, diameters) = dp_tables(sys, plaque.kind, plaque.level, d, depth);
    let root = values[0][a];
    let root_plus2 = root_value(sys, plaque.kind, plaque.level, a, d, depth + 2);
    let drift = if root > 0.0 { (root - root_plus2).abs() / root } else { 0.0 };
    let history: Vec<f64> = (0..=depth + 2).map(|k| root_value(sys, plaque.kind, plaque.level, a, d, k)).collect();
    let monotone = history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let resolution = diameters[depth as usize].iter().copied().fold(0.0, f64::max);
    Ok(MeasureTree {
        method: MeasureMethod::CylinderDp,
        kind: plaque.kind,
        level: plaque.level,
        root_symbol: a as u8,
        d,
        depth,
        values,
        diameters,
        root,
        resolution,
        root_plus2,
        drift,
        converged: drift < CONVERGENCE_DRIFT,
        monotone,
    })
}

/// `d = ent / (2 ln λ)`.
pub fn intrinsic_exponent(ent: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(ent / (2.0 * lambda.ln()))
}

/// Intrinsic exponent of a symbolic system from its Perron root:
/// `ent = 2 ln ρ`.
pub fn symbolic_intrinsic_exponent(sys: &SymbolicSystem) -> Result<f64> {
    intrinsic_exponent(2.0 * sys.spectral_radius()?.ln(), sys.lambda())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub kind: PlaqueKind,
    pub measure: f64,
    pub image_measure: f64,
    pub ratio: f64,
    /// `λ^d` for unstable plaques, `λ^(−d)` for stable ones.
    pub expected: f64,
    pub deviation: f64,
}

/// `μ^d(f(P)) / μ^d(P)`, both computed at the same DP depth.
pub fn scaling_check(sys: &SymbolicSystem, plaque: &Plaque, d: f64, depth: u32) -> Result<ScalingReport> {
    if plaque.level < 1 && plaque.kind == PlaqueKind::Unstable {
        return Err(Error::Precondition("unstable plaque must sit at level ≥ 1 so its image stays below the cap".into()));
    }
    let measure = hausdorff_estimate(sys, plaque, d, depth)?.root;
    let image_measure = hausdorff_estimate(sys, &plaque.image(), d, depth)?.root;
    if measure == 0.0 {
        return Err(Error::Coincident);
    }
    let ratio = image_measure / measure;
    let expected = match plaque.kind {
        PlaqueKind::Unstable => sys.lambda().powf(d),
        PlaqueKind::Stable => sys.lambda().powf(-d),
    };
    Ok(ScalingReport { kind: plaque.kind, measure, image_measure, ratio, expected, deviation: (ratio / expected - 1.0).abs() })
}
