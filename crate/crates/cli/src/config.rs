use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use citeworthy::provenance::{parse_config, RunConfig};

use crate::error::CliError;

/// Merges command-line flags over values from a config file and records the
/// effective value of every parameter that was consulted.
pub struct Resolver {
    command: String,
    file: RunConfig,
    used: BTreeSet<String>,
    effective: RunConfig,
}

impl Resolver {
    pub fn new(command: &str, config_path: Option<&Path>) -> Result<Self, CliError> {
        let file = match config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage("BadConfig", format!("{}: {e}", path.display())))?;
                parse_config(&text).map_err(|m| CliError::usage("BadConfig", format!("{}: {m}", path.display())))?
            }
            None => RunConfig::new(),
        };
        if let Some(c) = file.get("command") {
            if c != command {
                return Err(CliError::usage(
                    "BadConfig",
                    format!("config file is for command {c:?}, not {command:?}"),
                ));
            }
        }
        let mut effective = RunConfig::new();
        effective.insert("command".into(), command.into());
        Ok(Self { command: command.into(), file, used: BTreeSet::new(), effective })
    }

    fn from_file<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.used.insert(key.into());
        self.file
            .get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|e| CliError::usage("BadConfig", format!("config key {key} = {raw:?}: {e}")))
            })
            .transpose()
    }

    /// Flag value, else config value, else nothing.
    pub fn optional<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let file = self.from_file(key)?;
        let value = flag.or(file);
        if let Some(v) = &value {
            self.effective.insert(key.into(), v.to_string());
        }
        Ok(value)
    }

    pub fn value<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let value = self.optional(key, flag)?.unwrap_or(default);
        self.effective.insert(key.into(), value.to_string());
        Ok(value)
    }

    pub fn required<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.optional(key, flag)?.ok_or_else(|| {
            CliError::usage("MissingArgument", format!("the following required option was not provided: --{}", key.replace('_', "-")))
        })
    }

    /// A switch is on when given on the command line or set in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        self.value(key, flag.then_some(true), false)
    }

    /// Reject config keys that no parameter of the command consumed.
    pub fn finish(self) -> Result<RunConfig, CliError> {
        let unknown: Vec<&str> = self
            .file
            .keys()
            .filter(|k| k.as_str() != "command" && !self.used.contains(k.as_str()))
            .map(String::as_str)
            .collect();
        if !unknown.is_empty() {
            return Err(CliError::usage(
                "BadConfig",
                format!("unknown config keys for {}: {}", self.command, unknown.join(", ")),
            ));
        }
        Ok(self.effective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolver(text: &str) -> Resolver {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, text).unwrap();
        Resolver::new("train", Some(&path)).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let mut r = resolver("lr = 0.5\nseed = 3\n");
        assert_eq!(r.value("lr", Some(0.25), 1e-5).unwrap(), 0.25);
        assert_eq!(r.value("seed", None, 0u64).unwrap(), 3);
        assert_eq!(r.value("batch_size", None, 16usize).unwrap(), 16);
        assert!(!r.switch("include_section", false).unwrap());
        let cfg = r.finish().unwrap();
        assert_eq!(cfg["lr"], "0.25");
        assert_eq!(cfg["seed"], "3");
        assert_eq!(cfg["batch_size"], "16");
        assert_eq!(cfg["command"], "train");
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let mut r = resolver("bogus = 1\n");
        r.value("seed", None, 0u64).unwrap();
        assert_eq!(r.finish().unwrap_err().code, "BadConfig");
        let mut r = resolver("seed = x\n");
        assert_eq!(r.value("seed", None, 0u64).unwrap_err().exit_code, 2);
        let mut r = resolver("");
        assert_eq!(r.required::<String>("data", None).unwrap_err().code, "MissingArgument");
    }

    #[test]
    fn command_key_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "command = split\n").unwrap();
        assert!(Resolver::new("train", Some(&path)).is_err());
        assert!(Resolver::new("split", Some(&path)).is_ok());
    }
}
