use std::path::{Path, PathBuf};

use skylink::kv::KvFile;

use crate::error::{CliError, CliResult};

/// A preset or data file together with where it was found.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub origin: String,
    pub text: String,
    /// Directory used to resolve files the preset refers to.
    pub dir: Option<PathBuf>,
}

/// Looks `name` up as a path, then under `$SKYLINK_DATA`, then among the
/// built-in files.
pub fn load(name: &str, base: Option<&Path>) -> CliResult<Loaded> {
    let mut candidates = Vec::new();
    let direct = PathBuf::from(name);
    if direct.is_relative() {
        if let Some(b) = base {
            candidates.push(b.join(name));
        }
    }
    candidates.push(direct);
    if let Some(dir) = std::env::var_os("SKYLINK_DATA") {
        candidates.push(PathBuf::from(dir).join(name));
    }
    for path in candidates {
        if path.is_file() {
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            return Ok(Loaded {
                origin: path.display().to_string(),
                text,
                dir: path.parent().map(Path::to_path_buf),
            });
        }
    }
    let file = Path::new(name).file_name().and_then(|f| f.to_str()).unwrap_or(name);
    match skylink::data::builtin(file) {
        Some(text) => Ok(Loaded {
            origin: format!("builtin:{file}"),
            text: text.to_string(),
            dir: None,
        }),
        None => Err(CliError::validation("preset", format!("`{name}` not found"))),
    }
}

/// Parses a preset and applies `key=value` overrides.
pub fn load_kv(loaded: &Loaded, overrides: &[(String, String)]) -> CliResult<KvFile> {
    let mut kv = KvFile::parse(&loaded.text)?;
    for (k, v) in overrides {
        kv.set(k, v);
    }
    Ok(kv)
}

pub fn parse_override(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected key=value, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        assert_eq!(parse_override("alpha = 2.5"), Ok(("alpha".into(), "2.5".into())));
        assert_eq!(parse_override("q_F=1,2,3"), Ok(("q_F".into(), "1,2,3".into())));
        assert!(parse_override("alpha").is_err());
        assert!(parse_override("=3").is_err());
    }

    #[test]
    fn builtin_fallback_and_overlay() {
        let l = load("fig12.preset", None).unwrap();
        assert_eq!(l.origin, "builtin:fig12.preset");
        let kv = load_kv(&l, &[("D".into(), "500".into())]).unwrap();
        assert_eq!(kv.get_f64("D").unwrap(), 500.0);
        assert!(matches!(load("nope.preset", None), Err(CliError::Validation { .. })));
    }
}
