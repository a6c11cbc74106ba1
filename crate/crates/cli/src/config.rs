//! Flat `key = value` configuration with `#` comments.
//!
//! Values from a file are overlaid by command-line flags. Every lookup
//! records the value actually used (including defaults) so the resolved
//! configuration can be written next to the results and fed back in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
    consumed: BTreeSet<String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", lineno + 1)));
            }
            cfg.values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Applies a `key=value` override.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn lookup<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.consumed.insert(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("{key} = {raw}: {e}"))),
        }
    }

    pub fn get<T>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.lookup(key)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn get_opt<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.lookup::<T>(key)?;
        if let Some(v) = &v {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    pub fn get_string(&mut self, key: &str, default: &str) -> String {
        self.consumed.insert(key.to_string());
        let v = self.values.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.resolved.insert(key.to_string(), v.clone());
        v
    }

    /// Records a derived value that was not read from the input.
    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Fails on keys no lookup asked for, which are almost always typos.
    pub fn finish(&self) -> Result<(), CliError> {
        let unknown: Vec<&str> =
            self.values.keys().filter(|k| !self.consumed.contains(*k)).map(String::as_str).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!("unknown keys: {}", unknown.join(", "))))
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    pub fn render_resolved(&self) -> String {
        self.resolved.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Parses `a..b` (inclusive) or a comma-separated list of integers.
pub fn parse_levels(raw: &str) -> Result<Vec<i32>, CliError> {
    let bad = |e: std::num::ParseIntError| CliError::Config(format!("levels = {raw}: {e}"));
    if let Some((a, b)) = raw.split_once("..") {
        let a: i32 = a.trim().parse().map_err(bad)?;
        let b: i32 = b.trim().parse().map_err(bad)?;
        return Ok((a..=b).collect());
    }
    raw.split(',').map(|t| t.trim().parse().map_err(bad)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blank_lines_and_overrides() {
        let mut c = Config::parse("# header\n d = 2 \n\ns=1.5 # trailing\n").unwrap();
        c.set("s", 3.0);
        assert_eq!(c.get("d", 1usize).unwrap(), 2);
        assert_eq!(c.get("s", 0.0f64).unwrap(), 3.0);
        assert_eq!(c.get("p", 2.0f64).unwrap(), 2.0);
        assert!(c.finish().is_ok());
        assert!(c.render_resolved().contains("p = 2"));
    }

    #[test]
    fn unknown_and_malformed_keys() {
        assert!(Config::parse("novalue\n").is_err());
        let mut c = Config::parse("dtt = 0.1\n").unwrap();
        c.get("dt", 0.01f64).unwrap();
        assert!(c.finish().is_err());
        let mut c = Config::parse("dt = fast\n").unwrap();
        assert!(c.get("dt", 0.01f64).is_err());
    }

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("-1..2").unwrap(), vec![-1, 0, 1, 2]);
        assert_eq!(parse_levels("0, 3,5").unwrap(), vec![0, 3, 5]);
        assert!(parse_levels("a..b").is_err());
    }
}
