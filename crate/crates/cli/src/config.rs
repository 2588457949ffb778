//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` or `;` are skipped. Section
//! headers (`[...]`) are accepted and ignored, so every key lives in one
//! namespace. Command-line flags take precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value, got {raw:?}", i + 1))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(format!("config line {}: empty key", i + 1));
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(format!("config line {}: duplicate key {k:?}", i + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| format!("config key {key}: cannot parse {v:?}")),
        }
    }

    /// Flag value if given, else the file value.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, String> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, String> {
        Ok(self.pick(key, flag)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, String> {
        self.pick(key, flag)?.ok_or_else(|| format!("missing value for {key} (flag --{key} or config key)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let c = Config::parse("# loop weights\n[weights]\nn = 1.0\n; comment\norder=12\n\n").unwrap();
        assert_eq!(c.get::<f64>("n").unwrap(), Some(1.0));
        assert_eq!(c.get::<u32>("order").unwrap(), Some(12));
        assert_eq!(c.get::<f64>("tau").unwrap(), None);
        assert_eq!(c.pick("order", Some(5u32)).unwrap(), Some(5));
        assert!(c.get::<u32>("n").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("n 1.0").is_err());
        assert!(Config::parse("= 3").is_err());
        assert!(Config::parse("n = 1\nn = 2").is_err());
    }
}
