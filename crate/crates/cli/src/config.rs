//! Flat `key = value` configuration with line-aware diagnostics.
//!
//! ```text
//! # comment
//! observable = g2
//! u = 0, 1, 5      # lists are comma separated
//! sigma = 0.005
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Every key the sweep runner understands.
pub const KNOWN_KEYS: &[&str] = &[
    "observable",
    // dimer
    "omega1",
    "omega2",
    "u",
    "u1",
    "u2",
    "j",
    "v1",
    "v2",
    "vsq",
    "gamma_bath",
    // sweep
    "sweep",
    "min",
    "max",
    "n",
    "scale",
    "delta",
    "dk_mode",
    // pulses
    "shape",
    "sigma",
    "input",
    "nbar",
    "z1",
    "z2",
    // observable specific
    "emin",
    "emax",
    "dk_min",
    "dk_max",
    "box",
    "omega",
    "gamma",
    "nmax",
];

/// Where a value came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    File { line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { line } => write!(f, "line {line}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("{origin}: expected `key = value`, found {text:?}")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: key `{key}` given twice (first on {first})")]
    Duplicate {
        origin: Origin,
        key: String,
        first: Origin,
    },
    #[error("{origin}: key `{key}`: {reason}")]
    Value {
        origin: Origin,
        key: String,
        reason: String,
    },
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    value: String,
    origin: Origin,
}

/// Ordered key/value store. Later command-line entries replace earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

fn split_pair(text: &str) -> Option<(&str, &str)> {
    let (k, v) = text.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() || k.contains(char::is_whitespace) {
        return None;
    }
    Some((k, v))
}

fn check_key(key: &str, origin: &Origin) -> Result<(), ConfigError> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey {
            origin: origin.clone(),
            key: key.to_string(),
        })
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::File { line: i + 1 };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_pair(line).ok_or_else(|| ConfigError::Syntax {
                origin: origin.clone(),
                text: raw.trim().to_string(),
            })?;
            check_key(key, &origin)?;
            if let Some(prev) = cfg.entries.get(key) {
                return Err(ConfigError::Duplicate {
                    origin,
                    key: key.to_string(),
                    first: prev.origin.clone(),
                });
            }
            cfg.entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    origin,
                },
            );
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Config::parse(&text)
    }

    /// Applies one `key=value` override from the command line.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = split_pair(assignment).ok_or_else(|| ConfigError::Syntax {
            origin: Origin::Flag,
            text: assignment.to_string(),
        })?;
        self.set_value(key, value)
    }

    pub fn set_value(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        check_key(key, &Origin::Flag)?;
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                origin: Origin::Flag,
            },
        );
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn error(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Value {
            origin: self
                .entries
                .get(key)
                .map(|e| e.origin.clone())
                .unwrap_or(Origin::Flag),
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    /// Comma-separated items of `key`, or `None` when absent.
    pub fn list(&self, key: &str) -> Option<Vec<&str>> {
        self.raw(key).map(|v| v.split(',').map(str::trim).collect())
    }

    pub fn parse_with<T>(
        &self,
        key: &str,
        f: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        match self.list(key) {
            None => Ok(None),
            Some(items) => items
                .into_iter()
                .map(|s| f(s).map_err(|r| self.error(key, r)))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.parse_with(key, parse_f64)
    }

    /// Single real value, or `default` when absent.
    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.f64_list(key)? {
            None => Ok(default),
            Some(v) if v.len() == 1 => Ok(v[0]),
            Some(_) => Err(self.error(key, "expected a single value")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|_| {
                self.error(key, format!("expected a non-negative integer, found {s:?}"))
            }),
        }
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, found {s:?}")),
    }
}
