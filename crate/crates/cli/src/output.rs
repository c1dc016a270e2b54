//! CSV tables and the run manifest.

use std::path::{Path, PathBuf};

use cherenkov_core::{Error, Result, Scenario};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

pub struct Table {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        Self { name, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Full file contents: manifest reference, header, rows.
    pub fn render(&self, scenario_hash: &str) -> String {
        let mut out = format!("# manifest={MANIFEST_FILE} scenario={scenario_hash}\n");
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct OutputRecord {
    path: String,
    rows: usize,
    sha256: String,
}

#[derive(Serialize)]
struct ScenarioRecord<'a> {
    hash: String,
    source: Option<String>,
    text: Option<&'a str>,
    canonical: serde_json::Value,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    args: Vec<String>,
    flags: serde_json::Value,
    threads: usize,
    seed: Option<u64>,
    scenario: ScenarioRecord<'a>,
    warnings: &'a [String],
    wall_time_s: f64,
    outputs: Vec<OutputRecord>,
}

pub struct RunInfo<'a> {
    pub subcommand: &'a str,
    pub flags: serde_json::Value,
    pub threads: usize,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// Writes every table and then the manifest that lists them.
pub fn write_run(dir: &Path, scenario: &Scenario, tables: &[Table], info: RunInfo) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let hash = scenario.hash();
    let mut outputs = Vec::new();
    let mut paths = Vec::new();
    for t in tables {
        let text = t.render(&hash);
        let file = format!("{}.csv", t.name);
        let path = dir.join(&file);
        std::fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
        outputs.push(OutputRecord { path: file, rows: t.rows.len(), sha256: hex::encode(Sha256::digest(text.as_bytes())) });
        paths.push(path);
    }
    let manifest = Manifest {
        tool: "cherenkov",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: info.subcommand,
        args: std::env::args().skip(1).collect(),
        flags: info.flags,
        threads: info.threads,
        seed: info.seed,
        scenario: ScenarioRecord {
            hash,
            source: scenario.source.as_ref().map(|p| p.display().to_string()),
            text: scenario.text.as_deref(),
            canonical: serde_json::from_str(&scenario.canonical_json()).expect("canonical json parses"),
        },
        warnings: &scenario.warnings,
        wall_time_s: info.wall_time_s,
        outputs,
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    paths.push(path);
    Ok(paths)
}
