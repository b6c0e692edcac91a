use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::symbolic::{SymbolicSystem, TransitionMatrix};
use crate::torus::{ToralSystem, DEFAULT_XI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    FullShift,
    GoldenMean,
    RepellerAttractor,
    Matrix,
    CatMap,
    Toral,
}

impl SystemKind {
    pub const ALL: [SystemKind; 6] = [
        SystemKind::FullShift,
        SystemKind::GoldenMean,
        SystemKind::RepellerAttractor,
        SystemKind::Matrix,
        SystemKind::CatMap,
        SystemKind::Toral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::FullShift => "full-shift",
            SystemKind::GoldenMean => "golden-mean",
            SystemKind::RepellerAttractor => "repeller-attractor",
            SystemKind::Matrix => "matrix",
            SystemKind::CatMap => "cat-map",
            SystemKind::Toral => "toral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_toral(self) -> bool {
        matches!(self, SystemKind::CatMap | SystemKind::Toral)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    /// Alphabet size for `full-shift`.
    pub symbols: usize,
    /// 0/1 transition matrix for `matrix`, integer automorphism for `toral`.
    pub matrix: Option<Vec<Vec<i64>>>,
    /// `None` selects the default: 2 for symbolic systems, the unstable
    /// eigenvalue for toral ones.
    pub lambda: Option<f64>,
    pub xi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Capacity,
    Entropy,
    Fundamental,
    Triangles,
    Holonomy,
    Measure,
    Homogeneity,
    All,
}

impl Command {
    pub const CHECKS: [Command; 8] = [
        Command::Verify,
        Command::Capacity,
        Command::Entropy,
        Command::Fundamental,
        Command::Triangles,
        Command::Holonomy,
        Command::Measure,
        Command::Homogeneity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Capacity => "capacity",
            Command::Entropy => "entropy",
            Command::Fundamental => "fundamental",
            Command::Triangles => "triangles",
            Command::Holonomy => "holonomy",
            Command::Measure => "measure",
            Command::Homogeneity => "homogeneity",
            Command::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::CHECKS.into_iter().chain([Command::All]).find(|c| c.name() == s)
    }

    /// The checks this command expands to, in report order.
    pub fn expand(self) -> Vec<Command> {
        match self {
            Command::All => Self::CHECKS.to_vec(),
            c => vec![c],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Pairs sampled by `verify`, `triangles` and `holonomy`.
    pub pairs: usize,
    /// Largest agreement level of sampled symbolic pairs.
    pub max_level: u32,
    /// Toral pair scale for `verify` (must lie below ξ).
    pub scale: f64,
    /// Toral pair scale for `triangles`.
    pub triangle_scale: f64,
    /// Horizon of symbolic entropy estimates.
    pub n_max: u32,
    /// Horizon of toral entropy estimates.
    pub toral_n_max: u32,
    /// Horizon of local unstable entropy estimates.
    pub unstable_n_max: u32,
    /// Cylinder DP depth.
    pub depth: u32,
    /// Word length of the boxes compared with the Parry measure.
    pub box_depth: usize,
    pub base_points: usize,
    pub homogeneity_n: u32,
    pub bowen_points: usize,
    pub bowen_proposals: usize,
    /// Expanding factor of the refined Euclidean metric in the triangle curve.
    pub refined_lambda: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            pairs: 10_000,
            max_level: 12,
            scale: 0.01,
            triangle_scale: 1e-3,
            n_max: 12,
            toral_n_max: 8,
            unstable_n_max: 16,
            depth: 12,
            box_depth: 8,
            base_points: 20,
            homogeneity_n: 10,
            bowen_points: 8,
            bowen_proposals: 2000,
            refined_lambda: 1.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, formats: vec![Format::Json] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub command: Command,
    pub seed: u64,
    pub params: Params,
    pub output: OutputSpec,
}

pub const DEFAULT_SEED: u64 = 0x5E1F_5111;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration: {}", .0.join("; "))]
pub struct ConfigErrors(pub Vec<String>);

#[derive(Debug, Clone)]
pub enum BuiltSystem {
    Symbolic(SymbolicSystem),
    Toral(ToralSystem),
}

fn get_f64(obj: &Map<String, Value>, keys: &[&str], errors: &mut Vec<String>) -> Option<f64> {
    let (key, v) = keys.iter().find_map(|k| obj.get(*k).map(|v| (*k, v)))?;
    match v.as_f64() {
        Some(x) => Some(x),
        None => {
            errors.push(format!("`{key}` must be a number"));
            None
        }
    }
}

fn parse_system(v: &Value, errors: &mut Vec<String>) -> Option<SystemSpec> {
    let obj = match v {
        Value::String(s) => {
            let mut m = Map::new();
            m.insert("kind".into(), Value::String(s.clone()));
            m
        }
        Value::Object(m) => m.clone(),
        _ => {
            errors.push("`system` must be a kind name or an object".into());
            return None;
        }
    };
    for key in obj.keys() {
        if !["kind", "symbols", "matrix", "lambda", "λ", "xi", "ξ"].contains(&key.as_str()) {
            errors.push(format!("unknown field `system.{key}`"));
        }
    }
    let kind = match obj.get("kind").and_then(Value::as_str) {
        None => {
            errors.push("missing required field `system.kind`".into());
            None
        }
        Some(k) => {
            let parsed = SystemKind::parse(k);
            if parsed.is_none() {
                let known: Vec<&str> = SystemKind::ALL.iter().map(|k| k.name()).collect();
                errors.push(format!("unknown system kind `{k}` (expected one of {})", known.join(", ")));
            }
            parsed
        }
    };
    let symbols = match obj.get("symbols") {
        None => 2,
        Some(v) => match v.as_u64() {
            Some(n) if n >= 1 => n as usize,
            _ => {
                errors.push("`system.symbols` must be a positive integer".into());
                2
            }
        },
    };
    let matrix = match obj.get("matrix") {
        None => None,
        Some(v) => match serde_json::from_value::<Vec<Vec<i64>>>(v.clone()) {
            Ok(m) => Some(m),
            Err(_) => {
                errors.push("malformed matrix: expected an array of integer rows".into());
                None
            }
        },
    };
    let lambda = get_f64(&obj, &["lambda", "λ"], errors);
    let xi = get_f64(&obj, &["xi", "ξ"], errors);
    Some(SystemSpec { kind: kind?, symbols, matrix, lambda, xi })
}

/// Parses and validates a JSON configuration, collecting every problem.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let value: Value = if text.trim().is_empty() {
        Value::Object(Map::new())
    } else {
        match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return Err(ConfigErrors(vec![format!("invalid JSON: {e}")])),
        }
    };
    let Value::Object(obj) = value else {
        return Err(ConfigErrors(vec!["configuration must be a JSON object".into()]));
    };
    for key in obj.keys() {
        if !["system", "command", "seed", "params", "output", "lambda", "λ"].contains(&key.as_str()) {
            errors.push(format!("unknown field `{key}`"));
        }
    }

    let mut system = match obj.get("system") {
        None => {
            errors.push("missing required field `system`".into());
            None
        }
        Some(v) => parse_system(v, &mut errors),
    };
    if let Some(l) = get_f64(&obj, &["lambda", "λ"], &mut errors) {
        if let Some(s) = system.as_mut() {
            s.lambda = Some(l);
        }
    }

    let command = match obj.get("command") {
        None => {
            errors.push("missing required field `command`".into());
            None
        }
        Some(v) => {
            let parsed = v.as_str().and_then(Command::parse);
            if parsed.is_none() {
                errors.push(format!("unknown command {v}"));
            }
            parsed
        }
    };

    let seed = match obj.get("seed") {
        None => DEFAULT_SEED,
        Some(v) => v.as_u64().unwrap_or_else(|| {
            errors.push("`seed` must be a non-negative integer".into());
            DEFAULT_SEED
        }),
    };

    let params = match obj.get("params") {
        None => Params::default(),
        Some(v) => serde_json::from_value(v.clone()).unwrap_or_else(|e| {
            errors.push(format!("invalid `params`: {e}"));
            Params::default()
        }),
    };

    let output = match obj.get("output") {
        None => OutputSpec::default(),
        Some(v) => {
            let mut out = OutputSpec::default();
            match v {
                Value::Object(m) => {
                    for (k, val) in m {
                        match k.as_str() {
                            "dir" => match val.as_str() {
                                Some(d) => out.dir = Some(d.to_string()),
                                None => errors.push("`output.dir` must be a string".into()),
                            },
                            "formats" => match serde_json::from_value::<Vec<Format>>(val.clone()) {
                                Ok(f) => out.formats = f,
                                Err(_) => errors.push("`output.formats` must list \"json\" and/or \"csv\"".into()),
                            },
                            other => errors.push(format!("unknown field `output.{other}`")),
                        }
                    }
                }
                _ => errors.push("`output` must be an object".into()),
            }
            out
        }
    };

    if let Some(s) = &system {
        validate_system(s, &mut errors);
    }
    validate_params(&params, &mut errors);

    match (errors.is_empty(), system, command) {
        (true, Some(system), Some(command)) => Ok(ExperimentConfig { system, command, seed, params, output }),
        _ => Err(ConfigErrors(errors)),
    }
}

fn validate_system(s: &SystemSpec, errors: &mut Vec<String>) {
    if let Some(l) = s.lambda {
        if !(l > 1.0) || !l.is_finite() {
            errors.push(format!("λ must exceed 1 (got {l})"));
            return;
        }
    }
    if let Some(x) = s.xi {
        if !(x > 0.0) {
            errors.push(format!("ξ must be positive (got {x})"));
            return;
        }
    }
    let needs_matrix = matches!(s.kind, SystemKind::Matrix | SystemKind::Toral);
    if needs_matrix && s.matrix.is_none() {
        errors.push(format!("system kind `{}` requires `matrix`", s.kind.name()));
        return;
    }
    if !needs_matrix && s.matrix.is_some() {
        errors.push(format!("system kind `{}` does not take a `matrix`", s.kind.name()));
        return;
    }
    if let Err(e) = build_system(s) {
        errors.push(e);
    }
}

fn validate_params(p: &Params, errors: &mut Vec<String>) {
    let mut need = |ok: bool, msg: &str| {
        if !ok {
            errors.push(msg.to_string());
        }
    };
    need(p.pairs >= 1, "`params.pairs` must be at least 1");
    need(p.max_level >= 1, "`params.max_level` must be at least 1");
    need(p.scale > 0.0, "`params.scale` must be positive");
    need(p.triangle_scale > 0.0, "`params.triangle_scale` must be positive");
    need(p.n_max >= 4, "`params.n_max` must be at least 4");
    need(p.toral_n_max >= 4, "`params.toral_n_max` must be at least 4");
    need(p.unstable_n_max >= 4, "`params.unstable_n_max` must be at least 4");
    need(p.depth >= 1, "`params.depth` must be at least 1");
    need(p.box_depth >= 1, "`params.box_depth` must be at least 1");
    need(p.base_points >= 1, "`params.base_points` must be at least 1");
    need(p.homogeneity_n >= 1, "`params.homogeneity_n` must be at least 1");
    need(p.bowen_points >= 1 && p.bowen_proposals >= 1, "Bowen-ball sampling needs at least one point and proposal");
    need(p.refined_lambda > 1.0, "`params.refined_lambda` must exceed 1");
}

fn toral_matrix(m: &[Vec<i64>]) -> Result<[[i64; 2]; 2], String> {
    if m.len() != 2 || m.iter().any(|r| r.len() != 2) {
        return Err("malformed matrix: toral systems need a 2×2 integer matrix".into());
    }
    Ok([[m[0][0], m[0][1]], [m[1][0], m[1][1]]])
}

/// Constructs the system a `SystemSpec` describes.
pub fn build_system(s: &SystemSpec) -> Result<BuiltSystem, String> {
    let lam = s.lambda.unwrap_or(2.0);
    let symbolic = |m: Result<TransitionMatrix, crate::Error>| -> Result<BuiltSystem, String> {
        let m = m.map_err(|e| format!("malformed matrix: {e}"))?;
        SymbolicSystem::new(m, lam).map(BuiltSystem::Symbolic).map_err(|e| e.to_string())
    };
    match s.kind {
        SystemKind::FullShift => symbolic(TransitionMatrix::full_shift(s.symbols)),
        SystemKind::GoldenMean => symbolic(Ok(TransitionMatrix::golden_mean())),
        SystemKind::RepellerAttractor => symbolic(Ok(TransitionMatrix::repeller_attractor())),
        SystemKind::Matrix => {
            let rows = s.matrix.as_ref().ok_or("missing matrix")?;
            let mut bytes = Vec::with_capacity(rows.len());
            for r in rows {
                let row: Result<Vec<u8>, _> = r.iter().map(|&v| u8::try_from(v)).collect();
                bytes.push(row.map_err(|_| "malformed matrix: entries must be 0 or 1".to_string())?);
            }
            symbolic(TransitionMatrix::new(bytes))
        }
        SystemKind::CatMap | SystemKind::Toral => {
            let m = match &s.matrix {
                Some(m) => toral_matrix(m)?,
                None => [[2, 1], [1, 1]],
            };
            let xi = s.xi.unwrap_or(DEFAULT_XI);
            ToralSystem::with_xi(m, s.lambda, xi).map(BuiltSystem::Toral).map_err(|e| e.to_string())
        }
    }
}
