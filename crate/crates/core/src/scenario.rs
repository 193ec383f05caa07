//! File formats for simulation specs and run configurations.
//!
//! Paths inside a run configuration are resolved relative to the
//! configuration file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bayes::{CrispMeasurements, McmcConfig, PriorBox};
use crate::error::{Error, Result};
use crate::fuzzy::uniform_levels;
use crate::measurement::{FuzzyModalData, ValueUnit};
use crate::model::StructuralModel;
use crate::objective::WeightingConfig;
use crate::pipeline::{simulate_measurements, FfemuRun, OptimizerChoice};

/// Reads and parses a JSON file, keeping the path in errors.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Either a level count (uniform spacing) or an explicit descending list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelSchedule {
    Count(usize),
    Explicit(Vec<f64>),
}

impl Default for LevelSchedule {
    fn default() -> Self {
        LevelSchedule::Count(10)
    }
}

impl LevelSchedule {
    pub fn levels(&self) -> Vec<f64> {
        match self {
            LevelSchedule::Count(m) => uniform_levels(*m),
            LevelSchedule::Explicit(v) => v.clone(),
        }
    }
}

/// True parameters and symmetric spreads for simulated measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSpec {
    pub theta: Vec<f64>,
    /// Half-widths of the triangular parameters; zeros give crisp data.
    #[serde(default)]
    pub spreads: Option<Vec<f64>>,
    /// Relative half-widths, used when `spreads` is absent.
    #[serde(default)]
    pub relative_spread: Option<f64>,
    #[serde(default)]
    pub levels: LevelSchedule,
    #[serde(default)]
    pub unit: ValueUnit,
}

impl TruthSpec {
    pub fn spreads(&self) -> Result<Vec<f64>> {
        match (&self.spreads, self.relative_spread) {
            (Some(_), Some(_)) => Err(Error::Config("give either spreads or relative_spread, not both".into())),
            (Some(s), None) => Ok(s.clone()),
            (None, Some(r)) => Ok(self.theta.iter().map(|t| r * t).collect()),
            (None, None) => Ok(vec![0.0; self.theta.len()]),
        }
    }

    pub fn simulate(&self, model: &StructuralModel) -> Result<FuzzyModalData> {
        simulate_measurements(model, &self.theta, &self.spreads()?, &self.levels.levels(), self.unit)
    }
}

/// On-disk run configuration shared by the updating and sampling commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: PathBuf,
    pub measured: PathBuf,
    #[serde(default)]
    pub levels: LevelSchedule,
    #[serde(default)]
    pub optimizer: Option<serde_json::Value>,
    pub theta_min: Vec<f64>,
    pub theta_max: Vec<f64>,
    #[serde(default)]
    pub theta_initial: Option<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<WeightingConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bayes: Option<McmcConfig>,
}

/// A configuration with its referenced files loaded.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub config: RunConfig,
    pub model: StructuralModel,
    pub measured: FuzzyModalData,
    pub levels: Vec<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<LoadedRun> {
        let config: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let model = read_json(&base.join(&config.model))?;
        let measured = read_json(&base.join(&config.measured))?;
        let levels = config.levels.levels();
        Ok(LoadedRun {
            config,
            model,
            measured,
            levels,
        })
    }

    /// Parses the optimizer section. A missing section selects ACO with
    /// default settings.
    pub fn optimizer(&self) -> Result<OptimizerChoice> {
        let Some(value) = &self.optimizer else {
            return Ok(OptimizerChoice::Aco(Default::default()));
        };
        let name = value.get("name").and_then(|n| n.as_str()).unwrap_or("");
        if !OptimizerChoice::NAMES.contains(&name) {
            return Err(Error::Config(format!(
                "unknown optimizer {name:?}; valid choices: {}",
                OptimizerChoice::NAMES.join(", ")
            )));
        }
        serde_json::from_value(value.clone()).map_err(|e| Error::Config(format!("optimizer section: {e}")))
    }
}

impl LoadedRun {
    pub fn ffemu_run(&self) -> Result<FfemuRun> {
        let run = FfemuRun {
            model: self.model.clone(),
            measured: self.measured.clone(),
            levels: self.levels.clone(),
            optimizer: self.config.optimizer()?,
            theta_min: self.config.theta_min.clone(),
            theta_max: self.config.theta_max.clone(),
            weights: self.config.weights.clone(),
            initial: self.config.theta_initial.clone(),
            seed: self.config.seed,
        };
        run.validate()?;
        Ok(run)
    }

    pub fn prior(&self) -> PriorBox {
        PriorBox {
            lower: self.config.theta_min.clone(),
            upper: self.config.theta_max.clone(),
        }
    }

    /// Peak measurements as crisp data for the sampler.
    pub fn crisp_measurements(&self) -> CrispMeasurements {
        let shapes: Option<Vec<Vec<f64>>> = self
            .measured
            .modes
            .iter()
            .map(|m| m.shape.as_ref().map(|s| s.peak.clone()))
            .collect();
        CrispMeasurements {
            eigenvalues: self.measured.center_eigenvalues(),
            shapes,
        }
    }

    pub fn mcmc_config(&self) -> McmcConfig {
        self.config.bayes.clone().unwrap_or_default()
    }
}
