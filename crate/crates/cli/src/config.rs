//! Flat `key = value` configuration files and the run record embedded in
//! output headers.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use swapcount::{Error, Result};

/// Values from a config file, keyed like the long flags (`samples`,
/// `max-voters`, ...). Underscores in keys are read as dashes.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `key = value`, got `{line}`"),
                });
            };
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    Error::InvalidParameter(format!("config key `{key}`: cannot parse `{v}`"))
                })
            })
            .transpose()
    }
}

/// Resolves settings with precedence flag > config file > default, and
/// records every resolved value for the config hash.
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    record: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a ConfigFile, command: &str) -> Self {
        let mut record = BTreeMap::new();
        record.insert("command".to_string(), command.to_string());
        Resolver { file, record }
    }

    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + ToString,
    {
        let v = match flag {
            Some(v) => v,
            None => self.file.get(key)?.unwrap_or(default),
        };
        self.record.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Like [`Resolver::value`] for settings without a default.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + ToString,
    {
        let v = match flag {
            Some(v) => Some(v),
            None => self.file.get(key)?,
        };
        if let Some(v) = &v {
            self.record.insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + ToString,
    {
        self.optional(key, flag)?
            .ok_or_else(|| Error::InvalidParameter(format!("missing required setting `{key}`")))
    }

    /// A required output location. Not part of the record, so the same run
    /// written to two places carries the same hash.
    pub fn location(&mut self, key: &str, flag: Option<std::path::PathBuf>) -> Result<std::path::PathBuf> {
        match flag {
            Some(p) => Ok(p),
            None => self
                .file
                .get::<String>(key)?
                .map(Into::into)
                .ok_or_else(|| Error::InvalidParameter(format!("missing required setting `{key}`"))),
        }
    }

    pub fn finish(self) -> RunRecord {
        RunRecord { values: self.record }
    }
}

/// The resolved settings of a run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    values: BTreeMap<String, String>,
}

impl RunRecord {
    /// SHA-256 over the sorted `key=value` lines, first 16 hex digits.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.values {
            h.update(format!("{k}={v}\n"));
        }
        let digest = format!("{:x}", h.finalize());
        digest[..16].to_string()
    }

    /// Comment lines for output file headers.
    pub fn header(&self) -> Vec<String> {
        let seed = self.values.get("seed").map_or("-", String::as_str);
        vec![
            format!("swapcount {}", env!("CARGO_PKG_VERSION")),
            format!("seed {seed}"),
            format!("config {}", self.hash()),
        ]
    }
}
