//! Line-oriented `key=value` text used by config, cohort spec and model files.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One `key=value` line with its 1-based line number.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits `text` into entries. Blank lines and `#` comments are skipped;
/// whitespace around keys and values is trimmed.
pub fn parse(text: &str, path: &Path) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, format!("line {}: expected key=value", i + 1)))?;
        out.push(Entry {
            line: i + 1,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

impl Entry {
    pub fn parse_value<T: FromStr>(&self, path: &Path) -> Result<T> {
        self.value.parse().map_err(|_| {
            Error::parse(
                path,
                format!("line {}: bad value `{}` for `{}`", self.line, self.value, self.key),
            )
        })
    }

    pub fn parse_list<T: FromStr>(&self, path: &Path) -> Result<Vec<T>> {
        self.value
            .split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| {
                    Error::parse(path, format!("line {}: bad list item `{s}` for `{}`", self.line, self.key))
                })
            })
            .collect()
    }

    pub fn unknown(&self, path: &Path) -> Error {
        Error::parse(path, format!("line {}: unknown key `{}`", self.line, self.key))
    }
}

/// Joins values with commas using shortest round-trip formatting.
pub fn render_list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
