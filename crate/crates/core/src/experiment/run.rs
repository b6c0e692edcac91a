use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{build_system, BuiltSystem, Command, ExperimentConfig};
use crate::dimension::{
    capacity_symbolic, capacity_toral, check_fundamental_symbolic, check_fundamental_toral, symbolic_scales,
    default_toral_scales, entropy_symbolic, entropy_toral, local_unstable_entropy_toral, unstable_homogeneity_symbolic,
    BowenSampling, Subset,
};
use crate::dynamics::{
    holonomy_deviation, holonomy_project, refine_metric, triangle_curve, triangle_ratio, verify_self_similar,
};
use crate::error::{Error, Result};
use crate::measure::{
    box_measure, hausdorff_estimate, homogeneity_check, parry_compare, scaling_check, symbolic_intrinsic_exponent,
    toral_box_mass, Plaque,
};
use crate::symbolic::{BiSequence, Cylinder, SymbolicSystem};
use crate::torus::{EuclideanToral, SuCoords, ToralSystem, TorusPoint};

pub const TOOL_NAME: &str = "selfsim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A plot-ready table; written as one CSV file per table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub method: String,
    pub tolerance: f64,
    pub values: Value,
    /// Set when the check could not be evaluated; the message names the check.
    pub error: Option<String>,
    pub tables: Vec<Table>,
}

impl CheckResult {
    fn ok(name: &str, passed: bool, method: &str, tolerance: f64, values: Value) -> Self {
        Self { name: name.into(), passed, method: method.into(), tolerance, values, error: None, tables: Vec::new() }
    }

    fn with_table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    fn failed(name: &str, err: Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            method: "error".into(),
            tolerance: 0.0,
            values: Value::Null,
            error: Some(format!("{name}: {err}")),
            tables: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    /// The only field that varies between runs with the same configuration.
    pub wall_clock_ms: u64,
}

impl RunReport {
    /// The report without timing, byte-identical across runs.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("wall_clock_ms");
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn tables(&self) -> impl Iterator<Item = &Table> {
        self.checks.iter().flat_map(|c| c.tables.iter())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn rel_gap(a: f64, b: f64) -> f64 {
    if b != 0.0 {
        (a - b).abs() / b.abs()
    } else {
        (a - b).abs()
    }
}

/// Runs every check the command expands to. Checks run in parallel but the
/// report lists them in a fixed order and never depends on scheduling.
pub fn run(config: &ExperimentConfig) -> std::result::Result<RunReport, String> {
    let start = Instant::now();
    let system = build_system(&config.system)?;
    let commands = config.command.expand();
    let checks: Vec<CheckResult> = commands
        .par_iter()
        .flat_map_iter(|&c| match &system {
            BuiltSystem::Symbolic(s) => symbolic_check(s, c, config),
            BuiltSystem::Toral(t) => toral_check(t, c, config),
        })
        .collect();
    let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    Ok(RunReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        config: config.clone(),
        checks,
        passed,
        wall_clock_ms: start.elapsed().as_millis() as u64,
    })
}

fn wrap(name: &str, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::failed(name, e))
}

fn symbolic_check(sys: &SymbolicSystem, c: Command, cfg: &ExperimentConfig) -> Vec<CheckResult> {
    let p = &cfg.params;
    let seed = cfg.seed;
    match c {
        Command::Verify => vec![wrap("verify", sym_verify(sys, p.pairs, p.max_level, seed))],
        Command::Capacity => vec![wrap("capacity", sym_capacity(sys))],
        Command::Entropy => vec![wrap("entropy", sym_entropy(sys, p.n_max))],
        Command::Fundamental => vec![wrap("fundamental", sym_fundamental(sys, p.n_max))],
        Command::Triangles => vec![wrap("triangles", sym_triangles(sys, p.pairs, p.max_level, seed))],
        Command::Holonomy => vec![wrap("holonomy", sym_holonomy(sys, p.pairs, p.max_level, seed))],
        Command::Measure => vec![wrap("measure", sym_measure(sys, p.depth, p.box_depth, seed))],
        Command::Homogeneity => vec![
            wrap("homogeneity", sym_homogeneity(sys, p.base_points, p.homogeneity_n, p.depth, seed)),
            wrap("unstable-entropy", sym_unstable_entropy(sys, p.base_points, p.unstable_n_max, seed)),
        ],
        Command::All => unreachable!("expanded before dispatch"),
    }
}

fn sym_verify(sys: &SymbolicSystem, pairs: usize, max_level: u32, seed: u64) -> Result<CheckResult> {
    let sample = sys.sample_pairs(pairs, max_level, seed);
    let r = verify_self_similar(sys, &sample, 0.0);
    Ok(CheckResult::ok(
        "verify",
        r.passed,
        "exact-symbolic",
        0.0,
        json!({
            "pairs": pairs,
            "checked": r.checked,
            "pass_count": r.pass_count,
            "rejected": r.rejected.len(),
            "max_deviation": r.max_deviation,
            "worst_pair": r.worst_pair,
        }),
    ))
}

fn cover_table(entries: &[crate::dimension::CoverEntry], method: &str) -> Table {
    let mut t = Table::new("covers", &["eps", "count", "ln_count", "method"]);
    for e in entries {
        t.push(vec![num(e.eps), e.count.clone(), num(e.ln_count), method.into()]);
    }
    t
}

const SYMBOLIC_CAPACITY_TOL: f64 = 0.02;
const SYMBOLIC_ENTROPY_TOL: f64 = 0.01;
const TORAL_TOL: f64 = 0.10;

fn sym_capacity(sys: &SymbolicSystem) -> Result<CheckResult> {
    let (report, fit) = capacity_symbolic(sys, &Subset::Whole, &symbolic_scales(sys.lambda()))?;
    // the reference needs a Perron root; without one only the fit itself is reported
    let reference = sys.spectral_radius().ok().filter(|_| sys.matrix().is_primitive()).map(|r| 2.0 * r.ln() / sys.lambda().ln());
    let gap = reference.map(|r| rel_gap(fit.slope, r));
    let passed = report.is_monotone() && fit.slope.is_finite() && gap.is_none_or(|g| g <= SYMBOLIC_CAPACITY_TOL);
    Ok(CheckResult::ok(
        "capacity",
        passed,
        "exact-symbolic",
        SYMBOLIC_CAPACITY_TOL,
        json!({ "slope": fit.slope, "slope_stderr": fit.slope_stderr, "reference": reference, "gap": gap, "fit": fit }),
    )
    .with_table(cover_table(&report.entries, "exact-symbolic")))
}

fn growth_table(r: &crate::dimension::EntropyReport) -> Table {
    let mut t = Table::new("growth", &["n", "ln_cov_two_sided", "ln_cov_forward", "ln_cov_backward"]);
    for row in &r.table {
        t.push(vec![row.n.to_string(), num(row.two_sided), num(row.forward), num(row.backward)]);
    }
    t
}

fn sym_entropy(sys: &SymbolicSystem, n_max: u32) -> Result<CheckResult> {
    let r = entropy_symbolic(sys, &Subset::Whole, n_max)?;
    let reference = sys.spectral_radius().ok().filter(|_| sys.matrix().is_primitive()).map(|r| 2.0 * r.ln());
    let gap = reference.map(|x| rel_gap(r.two_sided, x));
    let passed = gap.is_none_or(|g| g <= SYMBOLIC_ENTROPY_TOL) && r.gap <= SYMBOLIC_ENTROPY_TOL;
    Ok(CheckResult::ok(
        "entropy",
        passed,
        "exact-symbolic",
        SYMBOLIC_ENTROPY_TOL,
        json!({
            "two_sided": r.two_sided,
            "forward": r.forward,
            "backward": r.backward,
            "standard": r.standard,
            "one_sided_gap": r.gap,
            "reference": reference,
            "reference_gap": gap,
        }),
    )
    .with_table(growth_table(&r)))
}

fn sym_fundamental(sys: &SymbolicSystem, n_max: u32) -> Result<CheckResult> {
    let r = check_fundamental_symbolic(sys, &Subset::Whole, n_max)?;
    Ok(CheckResult::ok(
        "fundamental",
        r.gap <= SYMBOLIC_CAPACITY_TOL,
        "exact-symbolic",
        SYMBOLIC_CAPACITY_TOL,
        json!({ "capacity": r.capacity, "entropy_over_log_lambda": r.entropy_over_log_lambda, "gap": r.gap, "lambda": r.lambda }),
    ))
}

fn sym_triangles(sys: &SymbolicSystem, pairs: usize, max_level: u32, seed: u64) -> Result<CheckResult> {
    let sample = sys.sample_pairs(pairs, max_level, seed);
    let reports: Vec<_> = sample
        .par_iter()
        .filter(|(x, y)| x != y)
        .map(|(x, y)| triangle_ratio(sys, x, y))
        .collect::<Result<_>>()?;
    let devs: Vec<f64> = reports.iter().filter_map(|r| r.deviation).collect();
    let max = devs.iter().copied().fold(0.0, f64::max);
    Ok(CheckResult::ok(
        "triangles",
        !devs.is_empty() && max == 0.0,
        "exact-symbolic",
        0.0,
        json!({ "pairs": reports.len(), "max_deviation": max }),
    ))
}

/// Pairs `p, q` on one unstable plaque, projected along stable sets onto the
/// unstable plaque of a point `r` agreeing with `p` on `|i| ≤ 3`.
fn sym_holonomy(sys: &SymbolicSystem, pairs: usize, max_level: u32, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let level = rand::Rng::random_range(&mut rng, 4..=max_level.max(4));
        let (p, q) = sys.random_unstable_pair(level, &mut rng);
        let r = p.resample_outside(sys.matrix(), Some(-3), Some(3), false, &mut rng);
        triples.push((p, q, r));
    }
    let outcomes: Vec<Result<_>> = triples
        .par_iter()
        .map(|(p, q, r)| {
            let (pp, pq) = (holonomy_project(sys, p, r)?, holonomy_project(sys, q, r)?);
            holonomy_deviation(sys, p, q, &pp, &pq)
        })
        .collect();
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for o in outcomes {
        match o {
            Ok(h) => {
                checked += 1;
                worst = worst.max(h.observed);
                violations += usize::from(!h.within_bound);
            }
            Err(Error::BoundUndefined(_)) | Err(Error::Coincident) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(CheckResult::ok(
        "holonomy",
        checked > 0 && violations == 0,
        "exact-symbolic",
        0.0,
        json!({ "checked": checked, "skipped": skipped, "violations": violations, "max_observed": worst }),
    ))
}

const SCALING_TOL: f64 = 0.03;
const PARRY_TOL: f64 = 0.05;
const HOLONOMY_GAP_TOL: f64 = 0.01;

fn sym_measure(sys: &SymbolicSystem, depth: u32, box_depth: usize, seed: u64) -> Result<CheckResult> {
    let d = symbolic_intrinsic_exponent(sys)?;
    if !sys.matrix().is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = sys.random_point(&mut rng);
    let tree = hausdorff_estimate(sys, &Plaque::unstable(x.clone(), 0), d, depth)?;
    let su = scaling_check(sys, &Plaque::unstable(x.clone(), 1), d, depth)?;
    let ss = scaling_check(sys, &Plaque::stable(x.clone(), 1), d, depth)?;
    let parry = parry_compare(sys, box_depth, d, depth)?;
    let boxed = box_measure(sys, &Cylinder::new(sys.matrix(), -1, x.word(-1, 1)), d, depth)?;
    let passed = tree.converged
        && su.deviation <= SCALING_TOL
        && ss.deviation <= SCALING_TOL
        && parry.max_gap <= PARRY_TOL
        && boxed.holonomy_gap <= HOLONOMY_GAP_TOL;
    let mut table = Table::new("parry", &["word", "box_mass", "parry", "gap"]);
    for r in &parry.rows {
        let w: String = r.word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        table.push(vec![w, num(r.box_mass), num(r.parry), num(r.gap)]);
    }
    Ok(CheckResult::ok(
        "measure",
        passed,
        "cylinder-dp",
        PARRY_TOL,
        json!({
            "d": d,
            "plaque_measure": tree.root,
            "drift": tree.drift,
            "converged": tree.converged,
            "unstable_scaling": { "ratio": su.ratio, "expected": su.expected, "deviation": su.deviation },
            "stable_scaling": { "ratio": ss.ratio, "expected": ss.expected, "deviation": ss.deviation },
            "parry_max_gap": parry.max_gap,
            "box_holonomy_gap": boxed.holonomy_gap,
        }),
    )
    .with_table(table))
}

fn random_points(sys: &SymbolicSystem, count: usize, seed: u64) -> Vec<BiSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sys.random_point(&mut rng)).collect()
}

fn sym_homogeneity(sys: &SymbolicSystem, points: usize, n_max: u32, depth: u32, seed: u64) -> Result<CheckResult> {
    let d = symbolic_intrinsic_exponent(sys)?;
    let xs = random_points(sys, points, seed);
    let scale = sys.xi() / sys.lambda();
    let t = homogeneity_check(sys, &xs, 1..=n_max, scale, scale, d, depth)?;
    let mut table = Table::new("homogeneity", &["n", "max_mass_delta", "min_mass_eps", "ratio"]);
    for r in &t.rows {
        table.push(vec![r.n.to_string(), num(r.max_delta), num(r.min_eps), num(r.ratio)]);
    }
    Ok(CheckResult::ok(
        "homogeneity",
        t.flat,
        "cylinder-dp",
        crate::measure::FLATNESS_SLOPE,
        json!({ "points": points, "c_observed": t.c_observed, "trend": t.trend, "flat": t.flat }),
    )
    .with_table(table))
}

fn sym_unstable_entropy(sys: &SymbolicSystem, points: usize, n_max: u32, seed: u64) -> Result<CheckResult> {
    let xs = random_points(sys, points, seed ^ 0x9E37_79B9);
    let r = unstable_homogeneity_symbolic(sys, &xs, n_max)?;
    Ok(CheckResult::ok(
        "unstable-entropy",
        r.spread <= SYMBOLIC_ENTROPY_TOL && r.reference_gap <= SYMBOLIC_ENTROPY_TOL,
        "exact-symbolic",
        SYMBOLIC_ENTROPY_TOL,
        json!({ "min": r.min, "max": r.max, "spread": r.spread, "reference": r.reference, "reference_gap": r.reference_gap }),
    ))
}

fn toral_check(sys: &ToralSystem, c: Command, cfg: &ExperimentConfig) -> Vec<CheckResult> {
    let p = &cfg.params;
    let seed = cfg.seed;
    let sampling = BowenSampling { base_points: p.bowen_points, proposals: p.bowen_proposals, seed };
    match c {
        Command::Verify => vec![wrap("verify", tor_verify(sys, p.scale, p.pairs, seed))],
        Command::Capacity => vec![wrap("capacity", tor_capacity(sys))],
        Command::Entropy => vec![wrap("entropy", tor_entropy(sys, p.toral_n_max, &sampling))],
        Command::Fundamental => vec![wrap("fundamental", tor_fundamental(sys, p.toral_n_max, &sampling))],
        Command::Triangles => vec![
            wrap("triangles", tor_triangles(sys, p.triangle_scale, p.pairs, seed)),
            wrap("triangle-curve", tor_curve(sys, p.refined_lambda, (p.pairs / 10).max(50), seed)),
        ],
        Command::Holonomy => vec![wrap("holonomy", tor_holonomy(sys, p.pairs, seed))],
        Command::Measure => vec![wrap("measure", tor_measure(sys))],
        Command::Homogeneity => vec![wrap("unstable-entropy", tor_unstable_entropy(sys, p.bowen_points, &sampling))],
        Command::All => unreachable!("expanded before dispatch"),
    }
}

fn tor_verify(sys: &ToralSystem, scale: f64, pairs: usize, seed: u64) -> Result<CheckResult> {
    let sample = sys.sample_pairs(scale, pairs, seed)?;
    let tol = crate::dynamics::MetricSystem::tolerance(sys);
    let r = verify_self_similar(sys, &sample, tol);
    Ok(CheckResult::ok(
        "verify",
        r.passed,
        "relative-tolerance",
        tol,
        json!({
            "pairs": pairs,
            "scale": scale,
            "checked": r.checked,
            "pass_count": r.pass_count,
            "rejected": r.rejected.len(),
            "max_deviation": r.max_deviation,
            "worst_pair": r.worst_pair,
        }),
    ))
}

fn tor_capacity(sys: &ToralSystem) -> Result<CheckResult> {
    let c = capacity_toral(sys, &default_toral_scales())?;
    let gap = rel_gap(c.combined.slope, 2.0);
    let mut table = Table::new("covers", &["eps", "greedy_upper", "packing_lower", "density", "sample_size"]);
    for b in &c.bounds {
        table.push(vec![
            num(b.eps),
            b.greedy_upper.to_string(),
            b.packing_lower.to_string(),
            num(b.density),
            b.sample_size.to_string(),
        ]);
    }
    Ok(CheckResult::ok(
        "capacity",
        gap <= TORAL_TOL,
        "greedy-packing",
        TORAL_TOL,
        json!({
            "slope": c.combined.slope,
            "greedy_slope": c.greedy.slope,
            "packing_slope": c.packing.slope,
            "reference": 2.0,
            "gap": gap,
        }),
    )
    .with_table(table))
}

fn tor_entropy(sys: &ToralSystem, n_max: u32, sampling: &BowenSampling) -> Result<CheckResult> {
    let r = entropy_toral(sys, n_max, sampling)?;
    let reference = 2.0 * sys.unstable_eigenvalue().abs().ln();
    let gap = rel_gap(r.two_sided, reference);
    Ok(CheckResult::ok(
        "entropy",
        gap <= TORAL_TOL,
        "bowen-volume",
        TORAL_TOL,
        json!({
            "two_sided": r.two_sided,
            "forward": r.forward,
            "backward": r.backward,
            "one_sided_gap": r.gap,
            "reference": reference,
            "reference_gap": gap,
        }),
    )
    .with_table(growth_table(&r)))
}

fn tor_fundamental(sys: &ToralSystem, n_max: u32, sampling: &BowenSampling) -> Result<CheckResult> {
    let r = check_fundamental_toral(sys, &default_toral_scales(), n_max, sampling)?;
    Ok(CheckResult::ok(
        "fundamental",
        r.gap <= TORAL_TOL,
        "greedy-packing+bowen-volume",
        TORAL_TOL,
        json!({ "capacity": r.capacity, "entropy_over_log_lambda": r.entropy_over_log_lambda, "gap": r.gap, "lambda": r.lambda }),
    ))
}

const TORAL_TRIANGLE_TOL: f64 = 1e-9;

fn tor_triangles(sys: &ToralSystem, scale: f64, pairs: usize, seed: u64) -> Result<CheckResult> {
    let sample = sys.sample_pairs(scale, pairs, seed)?;
    let devs: Vec<f64> = sample
        .par_iter()
        .map(|(x, y)| triangle_ratio(sys, x, y).map(|r| r.deviation.unwrap_or(0.0)))
        .collect::<Result<_>>()?;
    let max = devs.iter().copied().fold(0.0, f64::max);
    Ok(CheckResult::ok(
        "triangles",
        max <= TORAL_TRIANGLE_TOL,
        "relative-tolerance",
        TORAL_TRIANGLE_TOL,
        json!({ "pairs": devs.len(), "scale": scale, "max_deviation": max }),
    ))
}

/// Triangle curve of the refined flat metric over four dyadic scales; the
/// worst deviation must not grow as the scale shrinks.
fn tor_curve(sys: &ToralSystem, refined_lambda: f64, per_scale: usize, seed: u64) -> Result<CheckResult> {
    let refined = refine_metric(EuclideanToral::new(sys.clone(), sys.xi()), refined_lambda, 1e-6)?;
    let batches: Vec<_> = (0..4)
        .map(|k| {
            let s = 0.02 / 2f64.powi(k);
            sys.sample_pairs(s, per_scale, seed.wrapping_add(k as u64)).map(|p| (s, p))
        })
        .collect::<Result<_>>()?;
    let curve = triangle_curve(&refined, &batches)?;
    let monotone = curve.windows(2).all(|w| w[1].max_deviation <= w[0].max_deviation);
    let mut table = Table::new("triangle_curve", &["scale", "pairs", "max_deviation", "mean_deviation"]);
    for c in &curve {
        table.push(vec![num(c.scale), c.pairs.to_string(), num(c.max_deviation), num(c.mean_deviation)]);
    }
    Ok(CheckResult::ok(
        "triangle-curve",
        monotone,
        "refined-flat-metric",
        0.0,
        json!({ "refined_lambda": refined_lambda, "window": refined.window(), "monotone": monotone }),
    )
    .with_table(table))
}

fn tor_holonomy(sys: &ToralSystem, pairs: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = sys.xi();
    let (es, eu) = sys.exponents();
    let mut triples = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let p = sys.random_point(&mut rng);
        let t: f64 = xi * 2f64.powf(-rand::Rng::random_range(&mut rng, 4.0..12.0));
        let q = p.offset(sys.from_su(SuCoords { s: 0.0, u: t.powf(1.0 / eu) }));
        let off = xi / 8.0 * rand::Rng::random::<f64>(&mut rng);
        let r = p.offset(sys.from_su(SuCoords { s: off.powf(1.0 / es), u: (off / 2.0).powf(1.0 / eu) }));
        triples.push((p, q, r));
    }
    let outcomes: Vec<Result<_>> = triples
        .par_iter()
        .map(|(p, q, r): &(TorusPoint, TorusPoint, TorusPoint)| {
            let (pp, pq) = (holonomy_project(sys, p, r)?, holonomy_project(sys, q, r)?);
            holonomy_deviation(sys, p, q, &pp, &pq)
        })
        .collect();
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for o in outcomes {
        match o {
            Ok(h) => {
                checked += 1;
                worst = worst.max(h.observed);
                violations += usize::from(!h.within_bound);
            }
            Err(Error::BoundUndefined(_)) | Err(Error::Coincident) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(CheckResult::ok(
        "holonomy",
        checked > 0 && violations == 0,
        "relative-tolerance",
        0.0,
        json!({ "checked": checked, "skipped": skipped, "violations": violations, "max_observed": worst }),
    ))
}

fn tor_measure(sys: &ToralSystem) -> Result<CheckResult> {
    let (s, u) = (sys.xi() / 4.0, sys.xi() / 2.0);
    let b = toral_box_mass(sys, s, u);
    let area_s = sys.from_su(SuCoords { s, u: 0.0 });
    let area_u = sys.from_su(SuCoords { s: 0.0, u });
    let area = (area_s[0] * area_u[1] - area_s[1] * area_u[0]).abs();
    let gap = rel_gap(b.normalized, area);
    Ok(CheckResult::ok(
        "measure",
        gap <= 1e-12,
        "closed-form",
        1e-12,
        json!({ "d": b.d, "box_mass": b.normalized, "lebesgue_area": area, "gap": gap }),
    ))
}

fn tor_unstable_entropy(sys: &ToralSystem, points: usize, sampling: &BowenSampling) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let reference = sys.unstable_eigenvalue().abs().ln();
    let estimates: Vec<f64> = (0..points)
        .map(|_| local_unstable_entropy_toral(sys, &sys.random_point(&mut rng), 8))
        .collect::<Result<_>>()?;
    let worst = estimates.iter().map(|e| rel_gap(*e, reference)).fold(0.0, f64::max);
    Ok(CheckResult::ok(
        "unstable-entropy",
        worst <= TORAL_TOL,
        "greedy-unstable",
        TORAL_TOL,
        json!({ "estimates": estimates, "reference": reference, "max_gap": worst }),
    ))
}
