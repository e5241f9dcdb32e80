//! `key = value` configuration files, resolved against command-line flags.
//!
//! Keys are the long flag names. Blank lines and lines starting with `#`
//! are ignored. A flag given on the command line wins over the file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected `key = value`", k + 1))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                bail!("config line {}: empty key", k + 1);
            }
            if file.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("config line {}: duplicate key `{key}`", k + 1);
            }
        }
        Ok(Settings {
            file,
            ..Settings::default()
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                Settings::parse(&text)
            }
        }
    }

    /// Flag value, else the file entry, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let v = match (flag, self.file.get(key)) {
            (Some(v), _) => v,
            (None, Some(raw)) => raw
                .parse()
                .map_err(|e| anyhow!("config field `{key}`: cannot parse {raw:?}: {e}"))?,
            (None, None) => default,
        };
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Boolean switch: set by the flag, or by `key = true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        self.get(key, flag.then_some(true), false)
    }

    /// Fails on file keys no command asked for, naming the first one.
    pub fn finish(&self) -> Result<()> {
        if let Some(k) = self.file.keys().find(|k| !self.used.contains(*k)) {
            bail!("config field `{k}` is not recognized by this command");
        }
        Ok(())
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

/// Comma-separated list of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(RealList)
    }
}

impl Display for RealList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_and_unknown_keys_are_named() {
        let mut s = Settings::parse("# comment\nseed = 3\nt = 0.5\nbogus = 1\n").unwrap();
        assert_eq!(s.get("seed", Some(9u64), 0).unwrap(), 9);
        assert_eq!(s.get("t", None, 1.0f64).unwrap(), 0.5);
        let err = s.finish().unwrap_err().to_string();
        assert!(err.contains("`bogus`"), "{err}");
    }

    #[test]
    fn malformed_value_names_the_field() {
        let mut s = Settings::parse("n = two").unwrap();
        let err = s.get("n", None, 1usize).unwrap_err().to_string();
        assert!(err.contains("`n`"), "{err}");
        assert!(Settings::parse("no equals sign").is_err());
    }

    #[test]
    fn real_lists_round_trip() {
        let l: RealList = "0, 0.5,2".parse().unwrap();
        assert_eq!(l.0, vec![0.0, 0.5, 2.0]);
        assert_eq!(l.to_string(), "0,0.5,2");
        assert!("1,x".parse::<RealList>().is_err());
    }
}
