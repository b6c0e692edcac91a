use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use selfsim::experiment::{parse_config, run, write_artifacts, Format, RunReport};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Runs self-similarity, dimension and measure checks on symbolic and toral systems.
#[derive(Debug, Parser)]
#[command(name = "selfsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON experiment configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// System kind (full-shift, golden-mean, repeller-attractor, matrix, cat-map, toral).
    #[arg(long, global = true)]
    system: Option<String>,

    /// Matrix file: JSON rows or whitespace-separated text rows.
    #[arg(long, global = true)]
    matrix: Option<PathBuf>,

    /// Expanding factor override.
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// Directory for report.json and CSV tables; without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output formats, comma separated.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<FormatArg>,

    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "SELFSIM_WORKERS")]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    Verify,
    Capacity,
    Entropy,
    Fundamental,
    Triangles,
    Holonomy,
    Measure,
    Homogeneity,
    All,
    /// Parse and validate the configuration without running anything.
    Check,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl Cmd {
    fn name(self) -> Option<&'static str> {
        Some(match self {
            Cmd::Verify => "verify",
            Cmd::Capacity => "capacity",
            Cmd::Entropy => "entropy",
            Cmd::Fundamental => "fundamental",
            Cmd::Triangles => "triangles",
            Cmd::Holonomy => "holonomy",
            Cmd::Measure => "measure",
            Cmd::Homogeneity => "homogeneity",
            Cmd::All => "all",
            Cmd::Check => return None,
        })
    }
}

fn read_matrix(path: &PathBuf) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    if let Ok(v @ Value::Array(_)) = serde_json::from_str::<Value>(&text) {
        return Ok(v);
    }
    let mut rows = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let row: Result<Vec<i64>, _> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(str::parse).collect();
        rows.push(row.map_err(|_| format!("malformed matrix in {}", path.display()))?);
    }
    Ok(json!(rows))
}

/// Merges the config file and flag overrides into one JSON document so that
/// validation reports every problem at once.
fn assemble_config(cli: &Cli) -> Result<String, Vec<String>> {
    let mut root = match &cli.config {
        None => Map::new(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| vec![format!("cannot read {}: {e}", path.display())])?;
            if text.trim().is_empty() {
                Map::new()
            } else {
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(vec!["configuration must be a JSON object".into()]),
                    Err(e) => return Err(vec![format!("invalid JSON: {e}")]),
                }
            }
        }
    };
    if cli.system.is_some() || cli.matrix.is_some() {
        let mut sys = match root.remove("system") {
            Some(Value::Object(m)) => m,
            Some(Value::String(k)) => Map::from_iter([("kind".to_string(), Value::String(k))]),
            _ => Map::new(),
        };
        if let Some(k) = &cli.system {
            sys.insert("kind".into(), json!(k));
        }
        if let Some(p) = &cli.matrix {
            sys.insert("matrix".into(), read_matrix(p).map_err(|e| vec![e])?);
        }
        root.insert("system".into(), Value::Object(sys));
    }
    if let Some(l) = cli.lambda {
        root.remove("λ");
        root.insert("lambda".into(), json!(l));
    }
    if let Some(name) = cli.command.name() {
        root.insert("command".into(), json!(name));
    } else if !root.contains_key("command") {
        root.insert("command".into(), json!("all"));
    }
    if let Some(s) = cli.seed {
        root.insert("seed".into(), json!(s));
    }
    if cli.out.is_some() || !cli.format.is_empty() {
        let mut out = match root.remove("output") {
            Some(Value::Object(m)) => m,
            _ => Map::new(),
        };
        if let Some(d) = &cli.out {
            out.insert("dir".into(), json!(d.to_string_lossy()));
        }
        if !cli.format.is_empty() {
            let f: Vec<&str> = cli.format.iter().map(|f| if matches!(f, FormatArg::Json) { "json" } else { "csv" }).collect();
            out.insert("formats".into(), json!(f));
        }
        root.insert("output".into(), Value::Object(out));
    }
    Ok(Value::Object(root).to_string())
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn emit(text: &str) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn summarize(report: &RunReport) {
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        match &c.error {
            Some(e) => eprintln!("{status} {} ({e})", c.name),
            None => eprintln!("{status} {} [{}, tol {}]", c.name, c.method, c.tolerance),
        }
    }
    eprintln!("{} in {} ms", if report.passed { "passed" } else { "failed" }, report.wall_clock_ms);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot configure worker pool: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }
    let text = match assemble_config(&cli) {
        Ok(t) => t,
        Err(errors) => {
            for e in errors {
                eprintln!("config error: {e}");
            }
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(errors) => {
            for e in errors.0 {
                eprintln!("config error: {e}");
            }
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if matches!(cli.command, Cmd::Check) {
        let ok = emit(&serde_json::to_string_pretty(&config).expect("config serializes")).is_ok();
        return ExitCode::from(if ok { EXIT_PASS } else { EXIT_IO });
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match &config.output.dir {
        Some(dir) => match write_artifacts(&report, dir.as_ref(), &config.output.formats) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("cannot write artifacts to {dir}: {e}");
                return ExitCode::from(EXIT_IO);
            }
        },
        None if config.output.formats.contains(&Format::Json) => {
            if let Err(e) = emit(&report.to_json()) {
                eprintln!("cannot write report: {e}");
                return ExitCode::from(EXIT_IO);
            }
        }
        None => {}
    }
    summarize(&report);
    ExitCode::from(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}
