//! Key-value preset files.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys are case-sensitive. Lists are `;`-separated, and a point is a
//! `,`-separated triple, e.g. `users = 500,500,0; -500,500,0`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    entries: BTreeMap<String, String>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::parse(format!("line {}", lineno + 1), "expected `key = value`")
            })?;
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::parse(format!("line {}", lineno + 1), "empty key"));
            }
            if entries.insert(key.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::parse(key, "duplicate key"));
            }
        }
        Ok(Self { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Inserts or replaces a value (used for `--set key=value` overrides).
    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::parse(key, "missing required key"))?;
        raw.parse::<T>()
            .map_err(|_| Error::parse(key, format!("cannot parse `{raw}`")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.contains(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let v: f64 = self.get(key)?;
        if !v.is_finite() {
            return Err(Error::parse(key, "value must be finite"));
        }
        Ok(v)
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.contains(key) {
            self.get_f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn get_list_f64(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::parse(key, "missing required key"))?;
        raw.split([';', ','])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(key, format!("cannot parse `{s}`")))
            })
            .collect()
    }

    pub fn get_points(&self, key: &str) -> Result<Vec<Vec3<f64>>> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::parse(key, "missing required key"))?;
        raw.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|p| parse_point(key, p))
            .collect()
    }

    pub fn get_point(&self, key: &str) -> Result<Vec3<f64>> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::parse(key, "missing required key"))?;
        parse_point(key, raw)
    }
}

impl KvFile {
    /// Semicolon-separated rows of exactly `width` comma-separated numbers.
    /// A missing key yields no rows.
    pub fn get_rows(&self, key: &str, width: usize) -> Result<Vec<Vec<f64>>> {
        let Some(raw) = self.raw(key) else { return Ok(Vec::new()) };
        raw.split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|row| {
                let vals: Vec<f64> = row
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| Error::parse(key, format!("cannot parse `{v}`"))))
                    .collect::<Result<_>>()?;
                if vals.len() != width {
                    return Err(Error::parse(key, format!("expected {width} values per row but got `{row}`")));
                }
                Ok(vals)
            })
            .collect()
    }
}

fn parse_point(key: &str, s: &str) -> Result<Vec3<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::parse(key, format!("expected x,y,z but got `{s}`")));
    }
    let mut c = [0.0; 3];
    for (dst, p) in c.iter_mut().zip(&parts) {
        *dst = p
            .parse()
            .map_err(|_| Error::parse(key, format!("cannot parse `{p}`")))?;
    }
    Ok(Vec3::new(c[0], c[1], c[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_points() {
        let kv = KvFile::parse(
            "# header\nalpha = 2.3  # exponent\nusers = 1,2,0; 3,4,0\nname=fig12\n\n",
        )
        .unwrap();
        assert_eq!(kv.get_f64("alpha").unwrap(), 2.3);
        assert_eq!(kv.get_points("users").unwrap()[1], Vec3::new(3.0, 4.0, 0.0));
        assert_eq!(kv.raw("name"), Some("fig12"));
    }

    #[test]
    fn errors_name_the_key() {
        let kv = KvFile::parse("alpha = abc").unwrap();
        match kv.get_f64("alpha") {
            Err(Error::Parse { key, .. }) => assert_eq!(key, "alpha"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(KvFile::parse("a = 1\na = 2").is_err());
        assert!(KvFile::parse("novalue").is_err());
    }
}
