use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::asymptotics::Mode;
use crate::error::{Error, Result};
use crate::spectral::{KernelDescriptor, TeacherDescriptor};

use super::recipes::figure_recipe;

/// Output encoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Grid of phase ratios `delta_K`: an explicit list or a log-spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaGrid {
    List(Vec<f64>),
    LogRange { start: f64, stop: f64, points: usize },
}

impl DeltaGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            DeltaGrid::List(v) => v.clone(),
            DeltaGrid::LogRange { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*points)
                    .map(|i| {
                        let t = i as f64 / (*points - 1) as f64;
                        (start.ln() + t * (stop.ln() - start.ln())).exp()
                    })
                    .collect(),
            },
        }
    }
}

/// `"auto"` or an explicit degree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Truncation {
    #[default]
    Auto,
    Degree(usize),
}

impl Serialize for Truncation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Truncation::Auto => s.serialize_str("auto"),
            Truncation::Degree(l) => s.serialize_u64(*l as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Truncation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "auto" => Ok(Truncation::Auto),
            Value::Number(n) if n.as_u64().is_some() => Ok(Truncation::Degree(n.as_u64().unwrap_or(0) as usize)),
            other => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a non-negative integer, got {other}"
            ))),
        }
    }
}

impl Truncation {
    pub fn degree(self) -> Option<usize> {
        match self {
            Truncation::Auto => None,
            Truncation::Degree(l) => Some(l),
        }
    }
}

/// Which stages a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Modes {
    pub theory: bool,
    pub simulate: bool,
    pub ge: bool,
    pub mp_check: bool,
    /// Emit the `lambda -> 0` limit of a pure degree-K spectrum instead of
    /// finite-ridge theory rows.
    pub ridgeless: bool,
}

impl Default for Modes {
    fn default() -> Self {
        Modes {
            theory: true,
            simulate: false,
            ge: false,
            mp_check: false,
            ridgeless: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_trials() -> usize {
    1
}

fn default_mp_n() -> usize {
    1500
}

fn default_cap() -> f64 {
    crate::simulator::DEFAULT_SURROGATE_CAP
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Recipe this config was derived from, if any.
    #[serde(default)]
    pub recipe: Option<String>,
    pub kernel: KernelDescriptor,
    pub teacher: TeacherDescriptor,
    /// Phase degree `K`.
    pub phase: usize,
    /// Input dimension; `0` asks for limit-only theory.
    pub dimension: usize,
    #[serde(default)]
    pub lambda: Option<f64>,
    pub deltas: DeltaGrid,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub m_test: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub modes: Modes,
    #[serde(default)]
    pub theory_mode: Mode,
    #[serde(default = "default_mp_n")]
    pub mp_n: usize,
    #[serde(default = "default_cap")]
    pub surrogate_cap: f64,
    #[serde(default)]
    pub record_timings: bool,
    #[serde(default)]
    pub output: OutputSpec,
    /// Free-form provenance note carried into JSON output.
    #[serde(default)]
    pub note: Option<String>,
}

/// Overlay `patch` onto `base`, merging nested objects key by key.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, p) => *slot = p,
    }
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Parse and validate a JSON config. A `"recipe"` key starts from that
/// recipe and overlays the remaining keys.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let patch: Value = serde_json::from_str(text).map_err(|e| config_error("<root>", e.to_string()))?;
    let recipe = patch.get("recipe").cloned();
    let value = match recipe {
        Some(Value::String(name)) => {
            let base = figure_recipe(&name)?;
            let mut v = serde_json::to_value(&base).expect("recipe serializes");
            merge(&mut v, patch);
            v
        }
        Some(Value::Null) | None => patch,
        Some(_) => return Err(config_error("recipe", "expected a recipe name string")),
    };
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        config_error(path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.phase == 0 {
            return Err(config_error("phase", "phase degree K must be >= 1"));
        }
        match self.lambda {
            Some(l) if !(l > 0.0) || !l.is_finite() => {
                return Err(config_error(
                    "lambda",
                    format!(
                        "lambda must be > 0 (got {l}); for the ridgeless case set \"modes\": {{\"ridgeless\": true}}, which evaluates the ridgeless_limit operation"
                    ),
                ))
            }
            None if !self.modes.ridgeless || self.modes.simulate || self.modes.ge => {
                return Err(config_error("lambda", "missing ridge lambda"));
            }
            _ => {}
        }
        let grid = self.deltas.values();
        if grid.is_empty() {
            return Err(config_error("deltas", "delta grid is empty"));
        }
        if let DeltaGrid::LogRange { start, stop, .. } = self.deltas {
            if !(start > 0.0 && stop > 0.0) {
                return Err(config_error("deltas", "log range endpoints must be > 0"));
            }
        }
        if let Some((i, d)) = grid.iter().enumerate().find(|(_, d)| !(**d > 0.0) || !d.is_finite()) {
            return Err(config_error(format!("deltas[{i}]"), format!("delta must be > 0, got {d}")));
        }
        if self.trials == 0 {
            return Err(config_error("trials", "need at least one trial"));
        }
        let simulates = self.modes.simulate || self.modes.ge;
        if simulates && self.dimension < 3 {
            return Err(config_error("dimension", "simulation needs dimension >= 3"));
        }
        if self.dimension != 0 && self.dimension < 3 {
            return Err(config_error("dimension", "dimension must be 0 (limit only) or >= 3"));
        }
        if let Some(m) = self.m_test {
            if m < 1000 {
                return Err(config_error("m_test", "m_test must be >= 1000"));
            }
        }
        if self.modes.mp_check && self.mp_n < 100 {
            return Err(config_error("mp_n", "mp_n must be >= 100"));
        }
        if let Truncation::Degree(l) = self.truncation {
            if l < self.phase {
                return Err(config_error("truncation", format!("truncation {l} is below phase {}", self.phase)));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        self.deltas.values()
    }

    /// Number of trial rows the sweep will produce.
    pub fn planned_trials(&self) -> usize {
        let per = usize::from(self.modes.simulate) + usize::from(self.modes.ge);
        self.grid().len() * self.trials * per
    }
}
