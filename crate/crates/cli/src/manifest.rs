use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Files written by one run plus the numbers worth recording next to them.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub results: Map<String, Value>,
    pub inputs: Vec<(String, String, String)>,
}

impl Artifacts {
    pub fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }

    pub fn input(&mut self, role: &str, origin: &str, text: &str) {
        self.inputs.push((role.to_string(), origin.to_string(), sha256(text.as_bytes())));
    }
}

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every artifact and `manifest.json` into `out`.
pub fn write_all(
    out: &Path,
    command: &str,
    seed: Option<u64>,
    overrides: &[(String, String)],
    art: &Artifacts,
) -> CliResult<Vec<String>> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io(out))?;
    let mut files = Vec::new();
    let mut written = Vec::new();
    for (name, contents) in &art.files {
        let path = out.join(name);
        std::fs::write(&path, contents).map_err(io(&path))?;
        files.push(json!({ "name": name, "bytes": contents.len(), "sha256": sha256(contents.as_bytes()) }));
        written.push(name.clone());
    }
    let inputs: Vec<Value> =
        art.inputs.iter().map(|(role, origin, sum)| json!({ "role": role, "source": origin, "sha256": sum })).collect();
    let overrides: Map<String, Value> = overrides.iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect();
    let manifest = json!({
        "command": command,
        "seed": seed,
        "overrides": overrides,
        "inputs": inputs,
        "results": art.results,
        "files": files,
        "versions": { "skylink": env!("CARGO_PKG_VERSION") },
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = out.join("manifest.json");
    std::fs::write(&path, text).map_err(io(&path))?;
    written.push("manifest.json".to_string());
    Ok(written)
}
