//! Run manifests: every subcommand that writes files drops a
//! `run_manifest.json` next to its outputs with the full argv and the
//! resolved configuration, so a run can be repeated exactly.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub subcommand: String,
    /// Full command line; re-running it reproduces the outputs byte for
    /// byte for deterministic subcommands.
    pub argv: Vec<String>,
    pub resolved: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, resolved: serde_json::Value, outputs: &[&Path]) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool: "gpupark",
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            argv: std::env::args().collect(),
            resolved,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        }
    }

    /// Writes the manifest into the directory holding the first output.
    pub fn write_next_to(&self, primary_output: &Path) -> Result<PathBuf> {
        let dir = primary_output.parent().unwrap_or_else(|| Path::new("."));
        let path = dir.join("run_manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}
