//! Configured experiments: a JSON configuration names a system and a
//! command, [`run`] evaluates the matching checks, and the report is
//! written as JSON and versioned CSV tables.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

mod config;
mod run;

pub use config::{
    build_system, parse_config, BuiltSystem, Command, ConfigErrors, ExperimentConfig, Format, OutputSpec, Params,
    SystemKind, SystemSpec, DEFAULT_SEED,
};
pub use run::{run, CheckResult, RunReport, Table, TOOL_NAME, TOOL_VERSION};

/// First line of every CSV file.
pub const CSV_VERSION: &str = "selfsim-csv v1";

pub fn table_to_csv(t: &Table) -> String {
    let mut out = format!("# {CSV_VERSION} {}\n", t.name);
    out.push_str(&t.header.join(","));
    out.push('\n');
    for row in &t.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes `report.json` and, for the CSV format, one `<check>_<table>.csv`
/// per table. Returns the paths written, in order.
pub fn write_artifacts(report: &RunReport, dir: &Path, formats: &[Format]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if formats.contains(&Format::Json) {
        let p = dir.join("report.json");
        fs::write(&p, report.to_json())?;
        written.push(p);
    }
    if formats.contains(&Format::Csv) {
        for c in &report.checks {
            for t in &c.tables {
                let p = dir.join(format!("{}_{}.csv", c.name, t.name));
                fs::write(&p, table_to_csv(t))?;
                written.push(p);
            }
        }
    }
    Ok(written)
}
