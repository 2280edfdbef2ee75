//! Tables, summaries and the run manifest.

use std::path::Path;

use serde_json::Value;

use crate::config::{to_pretty_json, ArtifactEntry, Format, Manifest, Resolved};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        let delim = match format {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        };
        let mut w = csv::WriterBuilder::new().delimiter(delim).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Everything a diagnostic produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    /// Extra text artifacts: file name and contents.
    pub texts: Vec<(String, String)>,
    pub summary: Value,
    /// A checked bound failed.
    pub violation: bool,
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Tsv => "tsv",
    }
}

/// Writes artifacts, `summary.json` and `manifest.json`; returns the manifest.
pub fn write_run(dir: &Path, resolved: &Resolved, out: &RunOutput) -> Result<Manifest, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let format = resolved.config.output.format;
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for t in &out.tables {
        files.push((format!("{}.{}", t.name, extension(format)), t.render(format)?));
    }
    for (name, text) in &out.texts {
        files.push((name.clone(), text.clone().into_bytes()));
    }
    files.push(("summary.json".into(), to_pretty_json(&out.summary).into_bytes()));
    let mut artifacts = Vec::new();
    for (name, bytes) in &files {
        std::fs::write(dir.join(name), bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", dir.join(name).display())))?;
        artifacts.push(ArtifactEntry { file: name.clone(), bytes: bytes.len() });
    }
    let mut config = resolved.config.clone();
    config.output.dir = None;
    let manifest = Manifest {
        tool: "walkbench".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: walkbench_core::VERSION.into(),
        config,
        overrides: resolved.overrides.clone(),
        artifacts,
    };
    std::fs::write(dir.join("manifest.json"), to_pretty_json(&manifest))
        .map_err(|e| CliError::Io(format!("cannot write manifest: {e}")))?;
    Ok(manifest)
}
