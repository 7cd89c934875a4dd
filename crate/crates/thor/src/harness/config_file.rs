//! Flat `key=value` run configuration: one struct drives every subcommand.

use crate::hammer::run::HammerBudget;
use crate::search::{SearchConfig, SearchConfigError};
use serde::{Deserialize, Serialize};

/// Everything tunable about a run: corpus shape, split, preprocessing, the
/// searcher, and the standalone-hammer scale. `RunConfig::default()` is the
/// shipped experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub search: SearchConfig,
    pub n_theories: usize,
    pub theorems_per_theory: usize,
    pub train_fraction: f64,
    pub valid_fraction: f64,
    pub test_fraction: f64,
    pub use_trace_shortcut: bool,
    pub use_context: bool,
    /// Standalone hammer-only evaluation runs at the in-search hammer budget
    /// scaled by this factor.
    pub hammer_only_scale: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            search: SearchConfig::default(),
            n_theories: 20,
            theorems_per_theory: 30,
            train_fraction: 0.60,
            valid_fraction: 0.05,
            test_fraction: 0.35,
            use_trace_shortcut: true,
            use_context: true,
            hammer_only_scale: 4,
        }
    }
}

impl RunConfig {
    pub fn fractions(&self) -> (f64, f64, f64) {
        (self.train_fraction, self.valid_fraction, self.test_fraction)
    }

    /// Budget for the hammer-only baseline: one generous standalone call per
    /// theorem root.
    pub fn standalone_hammer_budget(&self) -> HammerBudget {
        self.search.hammer_budget.scaled(self.hammer_only_scale)
    }

    /// Budget for training-data preprocessing: the in-search hammer budget
    /// without the per-step clamp the searcher applies.
    pub fn preprocess_budget(&self) -> HammerBudget {
        self.search.hammer_budget.clone()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.search.validate()?;
        if self.n_theories == 0 || self.theorems_per_theory == 0 {
            return Err(ConfigError::EmptyCorpusShape);
        }
        let (a, b, c) = self.fractions();
        let positive = a > 0.0 && b >= 0.0 && c > 0.0;
        if !positive || !(a + b + c).is_finite() || a + b + c > 1.0 + 1e-9 {
            return Err(ConfigError::BadFractions);
        }
        if self.hammer_only_scale == 0 {
            return Err(ConfigError::BadValue {
                key: "hammer_only_scale".into(),
                value: "0".into(),
                message: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Set one key. Every knob the config file accepts goes through here.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "queue_cap" => self.search.queue_cap = parse_num(key, value)?,
            "max_queries" => self.search.max_queries = parse_num(key, value)?,
            "samples_per_expansion" => self.search.samples_per_expansion = parse_num(key, value)?,
            "temperature" => self.search.temperature = parse_num(key, value)?,
            "step_budget" => self.search.step_budget = parse_num(key, value)?,
            "total_budget" => self.search.total_budget = parse_num(key, value)?,
            "hammer_max_premises" => {
                self.search.hammer_budget.max_selected_premises = parse_num(key, value)?
            }
            "hammer_max_inferences" => {
                self.search.hammer_budget.max_inferences = parse_num(key, value)?
            }
            "hammer_wallclock_secs" => {
                self.search.hammer_budget.wallclock_secs = parse_optional(key, value)?
            }
            "step_wallclock_secs" => self.search.step_wallclock_secs = parse_optional(key, value)?,
            "total_wallclock_secs" => {
                self.search.total_wallclock_secs = parse_optional(key, value)?
            }
            "n_theories" => self.n_theories = parse_num(key, value)?,
            "theorems_per_theory" => self.theorems_per_theory = parse_num(key, value)?,
            "train_fraction" => self.train_fraction = parse_num(key, value)?,
            "valid_fraction" => self.valid_fraction = parse_num(key, value)?,
            "test_fraction" => self.test_fraction = parse_num(key, value)?,
            "use_trace_shortcut" => self.use_trace_shortcut = parse_bool(key, value)?,
            "use_context" => self.use_context = parse_bool(key, value)?,
            "hammer_only_scale" => self.hammer_only_scale = parse_num(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed config line `{0}`: expected key=value")]
    Malformed(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {message}")]
    BadValue {
        key: String,
        value: String,
        message: String,
    },
    #[error(transparent)]
    Search(#[from] SearchConfigError),
    #[error("split fractions must be positive (validation may be zero) and sum to at most 1")]
    BadFractions,
    #[error("n_theories and theorems_per_theory must be positive")]
    EmptyCorpusShape,
}

/// Parse a flat `key=value` file over the defaults. Blank lines and `#`
/// comments are skipped; unknown keys are errors, as are values the final
/// validation rejects.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed(line.to_string()));
        };
        config.apply(key.trim(), value.trim())?;
    }
    config.validate()?;
    Ok(config)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        message: e.to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            message: "expected true or false".to_string(),
        }),
    }
}

fn parse_optional(key: &str, value: &str) -> Result<Option<u64>, ConfigError> {
    if value == "off" || value == "none" {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}
