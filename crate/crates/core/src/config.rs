//! Run configuration: a TOML document with `[model]`, `[pulse]` and
//! `[grids]` blocks (required) and optional `[experiment]` and `[output]`
//! blocks. Keys left out of a block take the reference values; unknown
//! keys are errors.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::experiments::{GridParams, SweepVariable};
use crate::pulse::ChirpedGaussian;
use crate::quantum::{FranckCondon, SystemModel, Target};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelBlock {
    pub omega_g: f64,
    pub omega_e: f64,
    pub detuning: f64,
    pub mu: f64,
    pub gamma: f64,
    pub f14: f64,
    pub f23: f64,
    pub f24: f64,
    pub f13: f64,
}

impl Default for ModelBlock {
    fn default() -> Self {
        Self::from(&SystemModel::table1())
    }
}

impl From<&SystemModel> for ModelBlock {
    fn from(m: &SystemModel) -> Self {
        Self {
            omega_g: m.omega_g,
            omega_e: m.omega_e,
            detuning: m.detuning,
            mu: m.mu,
            gamma: m.gamma,
            f14: m.fc.f14,
            f23: m.fc.f23,
            f24: m.fc.f24,
            f13: m.fc.f13,
        }
    }
}

impl ModelBlock {
    pub fn model(&self) -> SystemModel {
        SystemModel {
            omega_g: self.omega_g,
            omega_e: self.omega_e,
            detuning: self.detuning,
            mu: self.mu,
            gamma: self.gamma,
            fc: FranckCondon {
                f14: self.f14,
                f23: self.f23,
                f24: self.f24,
                f13: self.f13,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseBlock {
    pub bandwidth: f64,
    /// Magnitude and sign of χ; pair experiments use ±|χ|.
    pub chirp: f64,
    pub carrier: f64,
}

impl Default for PulseBlock {
    fn default() -> Self {
        Self {
            bandwidth: 1.0,
            chirp: 80.0,
            carrier: 0.0,
        }
    }
}

/// Frame used by `simulate`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameChoice {
    #[default]
    Rotating,
    /// Keeps the carrier; needs a step that resolves it.
    Lab,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    pub target: Target,
    pub frame: FrameChoice,
    pub mu_values: Option<Vec<f64>>,
    pub gamma_values: Option<Vec<f64>>,
    pub masks: usize,
    pub seed: Option<u64>,
    pub bins: Option<Vec<usize>>,
    pub jobs: Option<usize>,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        Self {
            target: Target::ExcitedSurface,
            frame: FrameChoice::Rotating,
            mu_values: None,
            gamma_values: None,
            masks: 100,
            seed: Some(20_240_601),
            bins: None,
            jobs: None,
        }
    }
}

impl ExperimentBlock {
    pub fn sweep_values(&self, variable: SweepVariable) -> Vec<f64> {
        let given = match variable {
            SweepVariable::Mu => &self.mu_values,
            SweepVariable::Gamma => &self.gamma_values,
        };
        given.clone().unwrap_or_else(|| variable.default_values())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub pulse: PulseBlock,
    pub grids: GridParams,
    pub experiment: ExperimentBlock,
    pub output: OutputBlock,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<ModelBlock>,
    pulse: Option<PulseBlock>,
    grids: Option<GridParams>,
    experiment: Option<ExperimentBlock>,
    output: Option<OutputBlock>,
}

impl RunConfig {
    /// The reference configuration (μ = 1e-3, γ = 0.1, χ = 80).
    pub fn table1() -> Self {
        Self {
            model: ModelBlock::default(),
            pulse: PulseBlock::default(),
            grids: GridParams::default(),
            experiment: ExperimentBlock::default(),
            output: OutputBlock::default(),
        }
    }

    pub fn model(&self) -> SystemModel {
        self.model.model()
    }

    pub fn pulse(&self) -> Result<ChirpedGaussian> {
        ChirpedGaussian::new(self.pulse.bandwidth, self.pulse.chirp, self.pulse.carrier)
    }

    /// Checks every block against the preconditions of the code that
    /// consumes it.
    pub fn validate(&self) -> Result<()> {
        in_block("model", self.model().validate())?;
        in_block("pulse", self.pulse().map(|_| ()))?;
        in_block("grids", self.grids.validate())?;
        let e = &self.experiment;
        in_block("experiment", e.target.validate())?;
        for (field, values, min) in [
            ("experiment.mu_values", &e.mu_values, f64::MIN_POSITIVE),
            ("experiment.gamma_values", &e.gamma_values, 0.0),
        ] {
            if let Some(v) = values {
                if v.len() < 2 {
                    return Err(invalid(field, "needs at least 2 values"));
                }
                if v.iter().any(|x| !(x.is_finite() && *x >= min)) {
                    let bound = if min > 0.0 { "> 0" } else { "≥ 0" };
                    return Err(invalid(field, &format!("values must be finite and {bound}")));
                }
                if v.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater)) {
                    return Err(invalid(field, "values must be strictly increasing"));
                }
            }
        }
        if e.jobs == Some(0) {
            return Err(invalid("experiment.jobs", "must be at least 1"));
        }
        Ok(())
    }

    /// The configuration as TOML, as embedded in output headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }
}

fn invalid(field: &str, constraint: &str) -> Error {
    Error::ConfigValidation {
        field: field.to_string(),
        constraint: constraint.to_string(),
    }
}

fn in_block(block: &str, r: Result<()>) -> Result<()> {
    r.map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::ConfigValidation {
            field: format!("{block}.{name}"),
            constraint: reason,
        },
        other => other,
    })
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_error(text: &str, e: toml::de::Error) -> Error {
    Error::ConfigParse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().trim().to_string(),
    }
}

/// Parses `text`, applies `block.key=value` overrides in order, then
/// validates.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(text, e))?;
    if !overrides.is_empty() {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        raw = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ConfigParse {
                line: 0,
                message: format!("after overrides: {}", e.message().trim()),
            })?;
    }
    let missing = |b: &str| invalid(b, "block is required");
    let cfg = RunConfig {
        model: raw.model.ok_or_else(|| missing("model"))?,
        pulse: raw.pulse.ok_or_else(|| missing("pulse"))?,
        grids: raw.grids.ok_or_else(|| missing("grids"))?,
        experiment: raw.experiment.unwrap_or_default(),
        output: raw.output.unwrap_or_default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let bad = |why: &str| invalid(spec, why);
    let (path, value) = spec
        .split_once('=')
        .ok_or_else(|| bad("override must look like block.key=value"))?;
    let (block, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| bad("override key must look like block.key"))?;
    let value = value.trim();
    let parsed: toml::Value = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let entry = table
        .entry(block.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(key.to_string(), parsed);
            Ok(())
        }
        _ => Err(bad("override block is not a table")),
    }
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text, overrides)
}
