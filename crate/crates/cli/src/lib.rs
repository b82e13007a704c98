//! Scenario runner behind the `skylink` binary: every command loads a preset,
//! applies overrides, and writes CSV artifacts plus `manifest.json`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod manifest;
mod preset;

use std::path::PathBuf;

pub use commands::COMMANDS;
pub use error::{CliError, CliResult};
pub use manifest::sha256;
pub use preset::parse_override;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub command: String,
    pub preset: Option<String>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub overrides: Vec<(String, String)>,
}

/// Runs one command and returns the names of the files written to `spec.out`.
pub fn run_scenario(spec: &ScenarioSpec) -> CliResult<Vec<String>> {
    let art = commands::run(spec)?;
    manifest::write_all(&spec.out, &spec.command, spec.seed, &spec.overrides, &art)
}
