//! Layered `key=value` settings: flags over `LUNES_<KEY>` environment
//! variables over a configuration file over built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use lunes_core::kv::parse_kv;

use crate::error::{CliError, Result};

pub const ENV_PREFIX: &str = "LUNES_";

/// Environment variable overriding `key`.
pub fn env_var(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.to_ascii_uppercase())
}

/// Resolved settings for one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Merges the layers for the keys in `allowed`. Unknown keys in the file
    /// are rejected; environment variables for other keys are ignored.
    pub fn resolve<E>(allowed: &[&str], file: Option<&str>, env: E, flags: &[(&str, String)]) -> Result<Self>
    where
        E: Fn(&str) -> Option<String>,
    {
        let mut values = BTreeMap::new();
        if let Some(text) = file {
            let pairs = parse_kv(text).map_err(|e| CliError::usage(format!("config file: {e}")))?;
            for (k, v) in pairs {
                if !allowed.contains(&k.as_str()) {
                    return Err(CliError::usage(format!("config file: unknown key `{k}`")));
                }
                values.insert(k, v);
            }
        }
        for key in allowed {
            if let Some(v) = env(&env_var(key)) {
                values.insert(key.to_string(), v);
            }
        }
        for (k, v) in flags {
            debug_assert!(allowed.contains(k), "flag `{k}` missing from the allowed keys");
            values.insert(k.to_string(), v.clone());
        }
        Ok(Self { values })
    }

    /// Reads the file (if any) and the process environment.
    pub fn load(allowed: &[&str], config: Option<&Path>, flags: &[(&str, String)]) -> Result<Self> {
        let text = match config {
            Some(p) => Some(fs::read_to_string(p).map_err(CliError::io(p))?),
            None => None,
        };
        Self::resolve(allowed, text.as_deref(), |k| std::env::var(k).ok(), flags)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| CliError::usage(format!("missing `{key}` (flag, {} or config file)", env_var(key))))
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.trim().parse().map_err(|_| CliError::usage(format!("invalid value `{v}` for `{key}`"))))
            .transpose()
    }

    /// Comma-separated list.
    pub fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
            .unwrap_or_default()
    }

    /// Pairs whose key is in `keys`.
    pub fn subset<'a>(&'a self, keys: &'a [&str]) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.values.iter().filter(|(k, _)| keys.contains(&k.as_str())).map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
