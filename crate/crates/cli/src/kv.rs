//! Flat `key = value` configuration files. `#` starts a comment; keys may
//! not repeat.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", i + 1)))?;
            let k = k.trim().to_string();
            if k.is_empty() {
                return Err(CliError::usage(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(k.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CliError::usage(format!("line {}: key '{k}' repeated", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        let line = self.entries.get(key).map(|(l, _)| *l).unwrap_or(0);
        CliError::usage(format!("line {line}: '{key}': {msg}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| self.err(key, e)),
        }
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse_list(v).map(Some).map_err(|e| self.err(key, e)),
        }
    }

    /// Errors on any key outside `allowed` (prefix match for entries ending
    /// in `.`).
    pub fn check_known(&self, allowed: &[&str]) -> Result<(), CliError> {
        for k in self.keys() {
            let ok = allowed
                .iter()
                .any(|a| if a.ends_with('.') { k.starts_with(a) } else { k == *a });
            if !ok {
                return Err(self.err(k, "unknown key"));
            }
        }
        Ok(())
    }
}

/// Comma-separated values.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("'{}': {e}", x.trim())))
        .collect()
}
