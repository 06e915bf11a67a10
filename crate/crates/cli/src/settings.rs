//! Flat `key = value` config files, merged under command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::Invalid;

/// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, Invalid> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Invalid(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Invalid(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Invalid(format!("config line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, Invalid> {
    let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Resolves each setting from its flag, else the config file, else a default,
/// and records the resolved values for the report header.
pub struct Resolver {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Resolver { file, used: BTreeSet::new(), resolved: BTreeMap::new() }
    }

    /// `flag`, else the config value for `key`, parsed as `T`.
    pub fn opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, Invalid>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(s) => Some(s.parse::<T>().map_err(|e| Invalid(format!("{key}: `{s}`: {e}")))?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, Invalid>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool, Invalid> {
        let v = self.get(key, flag.then_some(true), false)?;
        Ok(v)
    }

    /// Rejects config keys that no setting of this subcommand consumed.
    pub fn finish(self) -> Result<BTreeMap<String, String>, Invalid> {
        if let Some(k) = self.file.keys().find(|k| !self.used.contains(*k)) {
            return Err(Invalid(format!("{k}: unknown key for this subcommand")));
        }
        Ok(self.resolved)
    }
}

/// `a` or `a:b` or `a:b:step`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub start: u32,
    pub end: u32,
    pub step: u32,
}

impl NRange {
    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.end).step_by(self.step as usize).collect()
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| t.parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
        let (start, end, step) = match parts.as_slice() {
            [a] => (num(a)?, num(a)?, 1),
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err("expected n, start:end or start:end:step".into()),
        };
        if start > end || step == 0 {
            return Err(format!("empty range {s}"));
        }
        Ok(NRange { start, end, step })
    }
}

impl Display for NRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.step == 1 {
            write!(f, "{}:{}", self.start, self.end)
        } else {
            write!(f, "{}:{}:{}", self.start, self.end, self.step)
        }
    }
}

/// Comma-separated floats.
pub fn parse_floats(key: &str, s: &str) -> Result<Vec<f64>, Invalid> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| Invalid(format!("{key}: `{t}`: {e}")))).collect()
}

/// `;`-separated groups of comma-separated floats, each of length `width`.
pub fn parse_tuples(key: &str, s: &str, width: usize) -> Result<Vec<Vec<f64>>, Invalid> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v = parse_floats(key, t)?;
            if v.len() != width {
                return Err(Invalid(format!("{key}: `{t}` needs {width} numbers")));
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = parse_config("# run\nn = 4 # inline\n\npreset=lps5\n").unwrap();
        assert_eq!(c["n"], "4");
        assert_eq!(c["preset"], "lps5");
        assert!(parse_config("n 4").is_err());
        assert!(parse_config("n = 1\nn = 2").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut r = Resolver::new(parse_config("n = 4\nL = 3").unwrap());
        assert_eq!(r.get("n", Some(7u32), 1).unwrap(), 7);
        assert_eq!(r.get("L", None, 8usize).unwrap(), 3);
        assert_eq!(r.get("p", None, 2u64).unwrap(), 2);
        let resolved = r.finish().unwrap();
        assert_eq!(resolved["n"], "7");
        assert_eq!(resolved["p"], "2");
    }

    #[test]
    fn unknown_and_malformed_keys_name_the_field() {
        let r = Resolver::new(parse_config("bogus = 1").unwrap());
        assert!(r.finish().unwrap_err().0.contains("bogus"));
        let mut r = Resolver::new(parse_config("n = x").unwrap());
        assert!(r.get::<u32>("n", None, 1).unwrap_err().0.starts_with("n:"));
    }

    #[test]
    fn ranges() {
        assert_eq!("5".parse::<NRange>().unwrap().values(), vec![5]);
        assert_eq!("2:4".parse::<NRange>().unwrap().values(), vec![2, 3, 4]);
        assert_eq!("10:20:5".parse::<NRange>().unwrap().values(), vec![10, 15, 20]);
        assert!("4:2".parse::<NRange>().is_err());
        assert!("1:2:0".parse::<NRange>().is_err());
    }
}
