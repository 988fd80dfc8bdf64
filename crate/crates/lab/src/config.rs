//! Flat `key = value` configuration files.
//!
//! ```text
//! # comment
//! family = standard_gaussian
//! [union]
//! dims = 4, 8, 16
//! ```
//!
//! Keys under a `[section]` header are addressed as `section.key`. Every
//! command declares the keys it understands; anything else is rejected.

use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: &str| LabError::config(format!("line {}: {msg}", lineno + 1));
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at("unterminated section header"))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(at("bad section name"));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| at("expected `key = value`"))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(at("bad key"));
            }
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if entries.insert(full.clone(), value.trim().to_string()).is_some() {
                return Err(at(&format!("duplicate key `{full}`")));
            }
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == ErrorKind::NotFound => Err(LabError::ConfigNotFound(path.to_path_buf())),
            Err(e) => Err(LabError::io(format!("reading {}", path.display()), e)),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Writes the entries back in the file format, top-level keys first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut current = "";
        let mut keys: Vec<&String> = self.entries.keys().collect();
        keys.sort_by_key(|k| (k.contains('.'), k.as_str()));
        for key in keys {
            let (section, name) = key.split_once('.').unwrap_or(("", key));
            if section != current {
                out.push_str(&format!("\n[{section}]\n"));
                current = section;
            }
            out.push_str(&format!("{name} = {}\n", self.entries[key]));
        }
        out
    }
}

/// One accepted key and its default (`None`: optional, no default).
pub type Key = (&'static str, Option<&'static str>);

/// Config values after defaults are applied, with typed accessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    resolved: Config,
}

impl Params {
    pub fn resolve(config: &Config, schema: &[Key]) -> Result<Self> {
        for key in config.keys() {
            if !schema.iter().any(|(k, _)| *k == key) {
                return Err(LabError::config(format!("unknown key `{key}`")));
            }
        }
        let mut resolved = Config::default();
        for (key, default) in schema {
            if let Some(v) = config.get(key).or(*default) {
                resolved.set(key, v);
            }
        }
        Ok(Params { resolved })
    }

    pub fn config(&self) -> &Config {
        &self.resolved
    }

    pub fn has(&self, key: &str) -> bool {
        self.resolved.get(key).is_some()
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.resolved
            .get(key)
            .ok_or_else(|| LabError::config(format!("missing key `{key}`")))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<T> {
        let raw = self.str(key)?;
        raw.parse()
            .map_err(|_| LabError::config(format!("`{key}` = `{raw}` is not {what}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.parsed(key, "an unsigned 64-bit integer")
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v: f64 = self.parsed(key, "a number")?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::config(format!("`{key}` must be finite")))
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        self.parsed(key, "true or false")
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        if self.has(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.str(key)?;
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| LabError::config(format!("`{key}`: `{}` is not a finite number", s.trim())))
            })
            .collect()
    }

    /// Comma-separated integers, or `doubling:START:MAX`.
    pub fn usize_grid(&self, key: &str) -> Result<Vec<usize>> {
        let raw = self.str(key)?;
        let bad = || {
            LabError::config(format!(
                "`{key}` = `{raw}` is not an integer list or doubling:START:MAX"
            ))
        };
        if let Some(spec) = raw.strip_prefix("doubling:") {
            let (start, max) = spec.split_once(':').ok_or_else(bad)?;
            let start: usize = start.trim().parse().map_err(|_| bad())?;
            let max: usize = max.trim().parse().map_err(|_| bad())?;
            let grid = subgauss_core::montecarlo::doubling_grid(start, max);
            return if grid.is_empty() { Err(bad()) } else { Ok(grid) };
        }
        raw.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_round_trip() {
        let cfg = Config::parse("# top\neps = 0.5 # inline\n\n[union]\ndims = 4, 8\n").unwrap();
        assert_eq!(cfg.get("eps"), Some("0.5"));
        assert_eq!(cfg.get("union.dims"), Some("4, 8"));
        assert_eq!(Config::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        for text in ["eps 0.5", "[open\n", "a = 1\na = 2", " = 3", "[bad name]"] {
            assert!(Config::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn unknown_keys_fail_closed() {
        let cfg = Config::parse("eps = 0.5\ntypo = 1").unwrap();
        let schema: &[Key] = &[("eps", Some("1")), ("dim", Some("3"))];
        assert!(Params::resolve(&cfg, schema).is_err());
        let cfg = Config::parse("eps = 0.5").unwrap();
        let p = Params::resolve(&cfg, schema).unwrap();
        assert_eq!(p.f64("eps").unwrap(), 0.5);
        assert_eq!(p.usize("dim").unwrap(), 3);
    }

    #[test]
    fn grids_and_lists() {
        let cfg = Config::parse("a = doubling:8:64\nb = 1, 2,5\nc = 1;2\nd = nan").unwrap();
        let schema: &[Key] = &[("a", None), ("b", None), ("c", None), ("d", None)];
        let p = Params::resolve(&cfg, schema).unwrap();
        assert_eq!(p.usize_grid("a").unwrap(), vec![8, 16, 32, 64]);
        assert_eq!(p.usize_grid("b").unwrap(), vec![1, 2, 5]);
        assert!(p.usize_grid("c").is_err());
        assert!(p.f64("d").is_err());
        assert!(p.f64_list("d").is_err());
    }
}
