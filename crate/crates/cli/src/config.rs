//! `key=value` configuration: one assignment per line, repeated keys and
//! comma-separated values both build lists, `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, Vec<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if !line.is_empty() {
                c.push(line).map_err(|e| UsageError(format!("config line {}: {e}", i + 1)))?;
            }
        }
        Ok(c)
    }

    fn push(&mut self, assignment: &str) -> Result<(), UsageError> {
        let Some((k, v)) = assignment.split_once('=') else {
            return usage(format!("expected key=value, got {assignment:?}"));
        };
        let key = k.trim();
        if key.is_empty() {
            return usage(format!("empty key in {assignment:?}"));
        }
        let items = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
        self.values.entry(key.to_string()).or_default().extend(items);
        Ok(())
    }

    /// Assignments from the command line; each key replaces the file's list.
    pub fn override_with(&mut self, assignments: &[String]) -> Result<(), UsageError> {
        let mut cli = Config::default();
        for a in assignments {
            cli.push(a)?;
        }
        for (k, v) in cli.values {
            self.values.insert(k, v);
        }
        Ok(())
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), UsageError> {
        for k in self.values.keys() {
            if !allowed.contains(&k.as_str()) {
                return usage(format!("unknown key {k:?} (expected one of {})", allowed.join(", ")));
            }
        }
        Ok(())
    }

    pub fn list<T: FromStr>(&self, key: &str, default: &[T]) -> Result<Vec<T>, UsageError>
    where
        T: Clone,
    {
        match self.values.get(key) {
            None => Ok(default.to_vec()),
            Some(v) if v.is_empty() => usage(format!("{key} has no values")),
            Some(v) => v
                .iter()
                .map(|s| s.parse::<T>().map_err(|_| UsageError(format!("bad value for {key}: {s:?}"))))
                .collect(),
        }
    }

    pub fn one<T: FromStr + Clone>(&self, key: &str, default: T) -> Result<T, UsageError> {
        let v = self.list(key, std::slice::from_ref(&default))?;
        match v.as_slice() {
            [x] => Ok(x.clone()),
            _ => usage(format!("{key} takes a single value")),
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.values.remove(key);
    }

    pub fn get(&self, key: &str) -> Option<&[String]> {
        self.values.get(key).map(|v| v.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_overrides() {
        let mut c = Config::parse("N=64\nN = 128, 256 # more\n\nQ=4\n").unwrap();
        assert_eq!(c.list::<f64>("N", &[]).unwrap(), vec![64.0, 128.0, 256.0]);
        c.override_with(&["N=8".into(), "k=2".into()]).unwrap();
        assert_eq!(c.list::<f64>("N", &[]).unwrap(), vec![8.0]);
        assert_eq!(c.one::<u64>("k", 1).unwrap(), 2);
        assert_eq!(c.one::<u64>("T", 7).unwrap(), 7);
        assert!(c.one::<f64>("missing", 1.0).is_ok());
        assert!(c.check_keys(&["N", "Q", "k"]).is_ok());
        assert!(c.check_keys(&["N"]).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(Config::parse("N").is_err());
        assert!(Config::parse("=3").is_err());
        let c = Config::parse("N=x\nQ=\n").unwrap();
        assert!(c.list::<f64>("N", &[]).is_err());
        assert!(c.list::<f64>("Q", &[]).is_err());
        let c = Config::parse("k=1,2").unwrap();
        assert!(c.one::<u64>("k", 1).is_err());
    }
}
