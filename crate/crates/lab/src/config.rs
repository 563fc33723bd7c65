//! Experiment definitions read from TOML or JSON.
//!
//! ```toml
//! experiment = "ww"
//! seed = 7
//! tolerance = 1e-2
//! x = "skew(SQRT2)"
//! y = "rotation(SQRT3)"
//! f = ["char(0,1)"]
//! phi = ["char(1)"]
//!
//! [schedule]
//! start = 8192
//! doublings = 4
//! ```
//!
//! Keys not used by the chosen experiment are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ergodic_core::averaging::WeightSequence;
use ergodic_core::folner::FolnerSequence;
use ergodic_core::{Observable, SystemDescriptor};
use serde::{Deserialize, Serialize};

use crate::report::{de_f64, ser_f64};

/// Invalid configuration, located by the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ww,
    ProductOrthogonality,
    WeightedMultirec,
    JoiningsSweep,
    SpectrumScan,
    TemperedCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ww => "ww",
            ExperimentKind::ProductOrthogonality => "product_orthogonality",
            ExperimentKind::WeightedMultirec => "weighted_multirec",
            ExperimentKind::JoiningsSweep => "joinings_sweep",
            ExperimentKind::SpectrumScan => "spectrum_scan",
            ExperimentKind::TemperedCheck => "tempered_check",
        }
    }

    /// Keys this experiment reads besides the common ones.
    fn keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Ww => &["x", "y", "f", "phi", "folner", "starts", "schedule"],
            ExperimentKind::ProductOrthogonality => &["x", "y", "f", "phi", "samples", "schedule"],
            ExperimentKind::WeightedMultirec => &[
                "x",
                "weight",
                "arc",
                "k",
                "scan_max",
                "witness_threshold",
                "schedule",
            ],
            ExperimentKind::JoiningsSweep => &["max_order", "all_generators"],
            ExperimentKind::SpectrumScan => {
                &["x", "observables", "candidate_bound", "max_den", "schedule"]
            }
            ExperimentKind::TemperedCheck => &["folner", "windows", "max_n", "cap"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `N = start * 2^j` for `j = 0..=doublings`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub start: u64,
    #[serde(default)]
    pub doublings: u32,
}

impl Schedule {
    pub fn values(&self) -> Vec<u64> {
        (0..=self.doublings).map(|j| self.start << j).collect()
    }

    pub fn last(&self) -> u64 {
        self.start << self.doublings
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-2;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// A parsed experiment definition. Textual fields hold the grammar of
/// `ergodic_core::parse` and are echoed verbatim in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(
        default = "default_tolerance",
        serialize_with = "ser_f64",
        deserialize_with = "de_f64"
    )]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u32>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_max: Option<u64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_f64",
        deserialize_with = "de_opt_f64"
    )]
    pub witness_threshold: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_generators: Option<bool>,

    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_den: Option<i64>,

    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windows: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u64>,
    /// Upper bound for the tempered constant, as a rational `p/q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<String>,
}

fn ser_opt_f64<S: serde::Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_f64(x, s),
        None => s.serialize_none(),
    }
}

fn de_opt_f64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    de_f64(d).map(Some)
}

impl ExperimentConfig {
    /// A config with only the common fields set.
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            output: None,
            format: None,
            schedule: None,
            x: None,
            y: None,
            f: Vec::new(),
            phi: Vec::new(),
            weight: None,
            folner: None,
            starts: None,
            samples: None,
            arc: None,
            k: None,
            scan_max: None,
            witness_threshold: None,
            max_order: None,
            all_generators: None,
            observables: Vec::new(),
            candidate_bound: None,
            max_den: None,
            windows: Vec::new(),
            max_n: None,
            cap: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let value: toml::Value =
            toml::from_str(text).map_err(|e| ConfigError::new("", e.message().to_string()))?;
        let cfg = serde_path_to_error::deserialize(value).map_err(path_error)?;
        validated(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
        de.end().map_err(|e| ConfigError::new("", e.to_string()))?;
        validated(cfg)
    }

    /// JSON when the extension is `.json` or the text opens with `{`,
    /// TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::new("tolerance", "must be positive"));
        }
        let allowed = self.experiment.keys();
        for key in self.present_keys() {
            if !allowed.contains(&key) {
                return Err(ConfigError::new(
                    key,
                    format!("not used by the {} experiment", self.experiment),
                ));
            }
        }
        if let Some(s) = &self.schedule {
            if s.start == 0 {
                return Err(ConfigError::new("schedule.start", "must be positive"));
            }
            if s.doublings > 40
                || s.start
                    .checked_shl(s.doublings)
                    .is_none_or(|v| v >> s.doublings != s.start)
            {
                return Err(ConfigError::new("schedule.doublings", "schedule overflows"));
            }
        }
        Ok(())
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |present: bool, key| {
            if present {
                keys.push(key);
            }
        };
        mark(self.schedule.is_some(), "schedule");
        mark(self.x.is_some(), "x");
        mark(self.y.is_some(), "y");
        mark(!self.f.is_empty(), "f");
        mark(!self.phi.is_empty(), "phi");
        mark(self.weight.is_some(), "weight");
        mark(self.folner.is_some(), "folner");
        mark(self.starts.is_some(), "starts");
        mark(self.samples.is_some(), "samples");
        mark(self.arc.is_some(), "arc");
        mark(self.k.is_some(), "k");
        mark(self.scan_max.is_some(), "scan_max");
        mark(self.witness_threshold.is_some(), "witness_threshold");
        mark(self.max_order.is_some(), "max_order");
        mark(self.all_generators.is_some(), "all_generators");
        mark(!self.observables.is_empty(), "observables");
        mark(self.candidate_bound.is_some(), "candidate_bound");
        mark(self.max_den.is_some(), "max_den");
        mark(!self.windows.is_empty(), "windows");
        mark(self.max_n.is_some(), "max_n");
        mark(self.cap.is_some(), "cap");
        keys
    }

    pub fn schedule(&self) -> Result<Schedule, ConfigError> {
        self.schedule
            .ok_or_else(|| ConfigError::new("schedule", "required"))
    }

    pub fn system(&self, key: &'static str) -> Result<SystemDescriptor, ConfigError> {
        let text = match key {
            "x" => &self.x,
            _ => &self.y,
        };
        parse_field(
            key,
            text.as_deref()
                .ok_or_else(|| ConfigError::new(key, "required"))?,
        )
    }

    pub fn observables(&self, key: &'static str) -> Result<Vec<Observable>, ConfigError> {
        let list = match key {
            "f" => &self.f,
            "phi" => &self.phi,
            _ => &self.observables,
        };
        list.iter()
            .enumerate()
            .map(|(i, s)| parse_field(&format!("{key}[{i}]"), s))
            .collect()
    }

    pub fn weight(&self) -> Result<Option<WeightSequence>, ConfigError> {
        self.weight
            .as_deref()
            .map(|s| parse_field("weight", s))
            .transpose()
    }

    /// `intervals`, `boxes:d` or the explicit `windows`.
    pub fn folner(&self) -> Result<FolnerSequence, ConfigError> {
        if !self.windows.is_empty() {
            if self.folner.is_some() {
                return Err(ConfigError::new(
                    "windows",
                    "give either `folner` or `windows`",
                ));
            }
            return FolnerSequence::custom(self.windows.clone())
                .map_err(|e| ConfigError::new("windows", e.to_string()));
        }
        match self.folner.as_deref() {
            None => Ok(FolnerSequence::Intervals),
            Some(s) => parse_folner(s).map_err(|m| ConfigError::new("folner", m)),
        }
    }
}

pub fn parse_folner(s: &str) -> Result<FolnerSequence, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("intervals") {
        return Ok(FolnerSequence::Intervals);
    }
    if let Some(d) = s.strip_prefix("boxes:") {
        let d: usize = d
            .trim()
            .parse()
            .map_err(|_| format!("bad dimension in `{s}`"))?;
        return FolnerSequence::boxes(d).map_err(|e| e.to_string());
    }
    Err(format!("expected `intervals` or `boxes:d`, found `{s}`"))
}

fn parse_field<T>(path: &str, text: &str) -> Result<T, ConfigError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    text.parse()
        .map_err(|e: T::Err| ConfigError::new(path, e.to_string()))
}

fn path_error<E: fmt::Display>(e: serde_path_to_error::Error<E>) -> ConfigError {
    let path = e.path().to_string();
    let path = if path == "." { String::new() } else { path };
    ConfigError::new(path, e.into_inner().to_string())
}

fn validated(cfg: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
    cfg.validate()?;
    Ok(cfg)
}
