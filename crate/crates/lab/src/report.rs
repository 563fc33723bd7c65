//! Experiment reports and their CSV and JSON forms.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which is
//! enough to read back the identical `f64`. Non-finite values become `NaN`,
//! `inf` or `-inf` in CSV and `null` in JSON.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Process exit status for this verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    /// The worse of the two: any failure fails, then any inconclusive part.
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Qualifiers attached to a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    /// A hypothesis of the experiment fails, so nothing was computed.
    Refused,
    /// The weight set has zero density.
    NotApplicable,
    /// Some sampled starts passed and others did not.
    StartSensitive,
    /// A positive length fell inside the guard band.
    Inconclusive,
    /// The inputs are not disjoint and inequality is the expected outcome.
    Counterexample,
}

/// A complex number serialized as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Value {
    #[serde(serialize_with = "ser_f64", deserialize_with = "de_f64")]
    pub re: f64,
    #[serde(serialize_with = "ser_f64", deserialize_with = "de_f64")]
    pub im: f64,
}

impl From<Complex64> for Value {
    fn from(z: Complex64) -> Self {
        Value { re: z.re, im: z.im }
    }
}

impl From<f64> for Value {
    fn from(re: f64) -> Self {
        Value { re, im: 0.0 }
    }
}

/// One line of output. `label` distinguishes groups within an experiment
/// (a start pair, a configuration, a joining pair).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub value: Value,
    #[serde(serialize_with = "ser_f64", deserialize_with = "de_f64")]
    pub bound: f64,
    pub verdict: Verdict,
}

impl Row {
    pub fn new(
        label: impl Into<String>,
        n: u64,
        value: impl Into<Value>,
        bound: f64,
        verdict: Verdict,
    ) -> Self {
        Row {
            label: label.into(),
            n,
            value: value.into(),
            bound,
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub verdict: Verdict,
    pub flags: Vec<Flag>,
    pub notes: Vec<String>,
    pub rows: Vec<Row>,
    pub config: ExperimentConfig,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        ExperimentReport {
            experiment: config.experiment.name().to_string(),
            verdict: Verdict::Pass,
            flags: Vec::new(),
            notes: Vec::new(),
            rows: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn flag(&mut self, flag: Flag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Stops with the given verdict because a hypothesis does not hold.
    pub fn refuse(mut self, verdict: Verdict, why: impl Into<String>) -> Self {
        self.flag(Flag::Refused);
        self.verdict = verdict;
        self.note(why);
        self
    }
}

pub const CSV_HEADER: [&str; 6] = [
    "experiment",
    "N",
    "value_re",
    "value_im",
    "bound",
    "verdict",
];

/// `{:.16e}`, with the CSV spellings of non-finite values.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn to_csv(report: &ExperimentReport) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Writing into memory cannot fail.
    w.write_record(CSV_HEADER).unwrap();
    for r in &report.rows {
        let name = if r.label.is_empty() {
            report.experiment.clone()
        } else {
            format!("{}/{}", report.experiment, r.label)
        };
        w.write_record([
            name,
            r.n.to_string(),
            format_f64(r.value.re),
            format_f64(r.value.im),
            format_f64(r.bound),
            r.verdict.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn to_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> serde_json::Result<ExperimentReport> {
    serde_json::from_str(text)
}

pub fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct EmitError {
    pub path: PathBuf,
    pub source: io::Error,
}

pub fn emit(report: &ExperimentReport, format: Format, path: &Path) -> Result<(), EmitError> {
    std::fs::write(path, render(report, format)).map_err(|source| EmitError {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    // A `{:.16e}` rendering is a valid JSON number.
    let raw = RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub(crate) fn de_f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}
