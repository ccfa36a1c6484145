//! Flat `key = value` run configuration.
//!
//! Keys are the long flag names (`group`, `flow-steps`, ...). `#` starts a
//! comment. Flags given on the command line override the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lieflow_core::adam::AdamConfig;
use lieflow_core::data::{Distribution, DistributionParams};
use lieflow_core::mlp::DEFAULT_HIDDEN;
use lieflow_core::training::{LrSchedule, TrainConfig};
use lieflow_core::{Group, LieGroup, MetricWeights};

use crate::error::{CliError, Result};

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "group",
    "source",
    "target",
    "steps",
    "batch",
    "lr",
    "schedule",
    "seed",
    "epsilon",
    "weights",
    "hidden",
    "extent",
    "radius",
    "sigma",
    "spread",
    "out",
    "checkpoint",
    "input",
    "n",
    "flow-steps",
    "permutations",
];

pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_N: usize = 500;
pub const DEFAULT_FLOW_STEPS: usize = 100;
pub const DEFAULT_PERMUTATIONS: usize = 200;

/// Unparsed key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut config = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| CliError::Config { path: path.to_path_buf(), line: i + 1, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if config.values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Sets `key`, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        assert!(KEYS.contains(&key), "unknown config key {key}");
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::flag(key, format!("invalid value `{v}`: {e}"))))
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|p| p.trim().parse::<T>().map_err(|e| CliError::flag(key, format!("invalid entry `{p}`: {e}"))))
                    .collect()
            })
            .transpose()
    }

    pub fn group(&self) -> Result<Option<Group>> {
        self.get("group")
            .map(|id| Group::from_id(id).map_err(|_| CliError::flag("group", format!("unknown group `{id}` (try r1, r2, se2, so3, se2xr2)"))))
            .transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn seed(&self) -> Result<u64> {
        Ok(self.parsed("seed")?.unwrap_or(0))
    }

    pub fn out(&self) -> PathBuf {
        PathBuf::from(self.get("out").unwrap_or(DEFAULT_OUT))
    }

    pub fn checkpoint(&self) -> PathBuf {
        self.get("checkpoint").map(PathBuf::from).unwrap_or_else(|| self.out().join("checkpoint.json"))
    }

    pub fn distribution_params(&self) -> Result<DistributionParams> {
        let d = DistributionParams::default();
        Ok(DistributionParams {
            extent: self.parsed("extent")?.unwrap_or(d.extent),
            radius: self.parsed("radius")?.unwrap_or(d.radius),
            sigma: self.parsed("sigma")?.unwrap_or(d.sigma),
            spread: self.parsed("spread")?.unwrap_or(d.spread),
        })
    }

    /// Resolves a distribution id given under `key` (or `fallback`).
    pub fn distribution(&self, key: &str, group: &Group, fallback: Option<&str>) -> Result<Distribution> {
        let id = match (self.get(key), fallback) {
            (Some(id), _) | (None, Some(id)) => id,
            (None, None) => return Err(CliError::flag(key, "required (flag or config key)")),
        };
        Distribution::parse(group, id, self.distribution_params()?)
            .map_err(|e| CliError::flag(key, format!("`{id}` on {}: {e}", group.name())))
    }

    pub fn train_config(&self, group: &Group) -> Result<TrainConfig> {
        let d = TrainConfig::default();
        let weights = match self.list::<f64>("weights")? {
            Some(w) => {
                if w.len() != group.dim() {
                    return Err(CliError::flag("weights", format!("need {} weights for {}, got {}", group.dim(), group.name(), w.len())));
                }
                Some(MetricWeights::new(w).map_err(|e| CliError::flag("weights", e.to_string()))?)
            }
            None => None,
        };
        let config = TrainConfig {
            steps: self.usize_or("steps", d.steps)?,
            batch_size: self.usize_or("batch", d.batch_size)?,
            seed: self.seed()?,
            epsilon: self.parsed("epsilon")?.unwrap_or(d.epsilon),
            adam: AdamConfig { lr: self.parsed("lr")?.unwrap_or(d.adam.lr), ..d.adam },
            schedule: match self.get("schedule") {
                Some(name) => LrSchedule::parse(name).ok_or_else(|| CliError::flag("schedule", format!("unknown schedule `{name}` (constant or cosine)")))?,
                None => d.schedule,
            },
            hidden: self.list("hidden")?.unwrap_or_else(|| DEFAULT_HIDDEN.to_vec()),
            weights,
        };
        if let Err(e) = config.validate() {
            let message = match e {
                lieflow_core::Error::InvalidArgument(m) => m,
                other => other.to_string(),
            };
            return Err(CliError::flag(flag_for(&message), message));
        }
        Ok(config)
    }
}

/// Best guess at the flag a validation message is about.
fn flag_for(message: &str) -> &'static str {
    if message.starts_with("steps") {
        "steps"
    } else if message.starts_with("batch") {
        "batch"
    } else if message.starts_with("epsilon") {
        "epsilon"
    } else if message.starts_with("learning") {
        "lr"
    } else {
        "hidden"
    }
}

/// Resolved settings of one command, written next to its outputs.
#[derive(Debug, Default)]
pub struct Resolved(Vec<(&'static str, String)>);

impl Resolved {
    pub fn push(&mut self, key: &'static str, value: impl Display) -> &mut Self {
        debug_assert!(KEYS.contains(&key));
        self.0.push((key, value.to_string()));
        self
    }

    pub fn distribution_params(&mut self, p: &DistributionParams) -> &mut Self {
        self.push("extent", p.extent).push("radius", p.radius).push("sigma", p.sigma).push("spread", p.spread)
    }

    pub fn render(&self, command: &str) -> String {
        let mut text = format!("# resolved `lieflow {command}` configuration\n");
        for (k, v) in &self.0 {
            text.push_str(&format!("{k} = {v}\n"));
        }
        text
    }

    pub fn write(&self, command: &str, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{command}.resolved.cfg"));
        fs::write(&path, self.render(command)).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Comma-joined list in config syntax.
pub fn join<T: Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("run.cfg"))
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let c = parse("# a run\n\ngroup = se2  # planar\nsteps=10\n").unwrap();
        assert_eq!(c.get("group"), Some("se2"));
        assert_eq!(c.usize_or("steps", 1).unwrap(), 10);
        assert_eq!(c.usize_or("batch", 7).unwrap(), 7);
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse("group = se2\nlearning_rate = 1\n").unwrap_err().to_string();
        assert!(err.contains("run.cfg:2") && err.contains("learning_rate"), "{err}");
    }

    #[test]
    fn duplicate_and_malformed_lines_are_rejected() {
        assert!(parse("seed = 1\nseed = 2\n").is_err());
        assert!(parse("seed 1\n").is_err());
    }

    #[test]
    fn bad_values_name_the_flag() {
        let c = parse("group = se3\nsteps = many\n").unwrap();
        assert!(c.group().unwrap_err().to_string().starts_with("--group"));
        assert!(c.usize_or("steps", 1).unwrap_err().to_string().starts_with("--steps"));
    }

    #[test]
    fn train_config_defaults_and_overrides() {
        let g = Group::se2();
        let mut c = parse("lr = 0.01\nhidden = 8, 8\n").unwrap();
        c.set("weights", "1,1,2");
        let t = c.train_config(&g).unwrap();
        assert_eq!(t.adam.lr, 0.01);
        assert_eq!(t.hidden, vec![8, 8]);
        assert_eq!(t.steps, TrainConfig::default().steps);
        assert_eq!(t.weights.unwrap().as_slice(), &[1.0, 1.0, 2.0]);
        c.set("weights", "1,1");
        assert!(c.train_config(&g).unwrap_err().to_string().starts_with("--weights"));
        c.set("weights", "1,1,1");
        c.set("epsilon", "1.5");
        assert!(c.train_config(&g).unwrap_err().to_string().starts_with("--epsilon"));
    }

    #[test]
    fn resolved_output_parses_back() {
        let mut r = Resolved::default();
        r.push("group", "se2").push("lr", 0.1f64 + 0.2).push("hidden", join(&[4, 4]));
        let c = parse(&r.render("train")).unwrap();
        assert_eq!(c.parsed::<f64>("lr").unwrap(), Some(0.1 + 0.2));
        assert_eq!(c.get("hidden"), Some("4,4"));
    }
}
