//! Result bundle layout: JSON summaries plus CSV curves, histories and chains.
//!
//! Summaries hold raw values only. Percent errors and coefficients of
//! variation are derived when a report is rendered.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use ffemu_core::fuzzy::{AlphaCutStack, Interval};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const UPDATE_SUMMARY: &str = "summary.json";
pub const BAYES_SUMMARY: &str = "bayes_summary.json";
pub const METADATA: &str = "metadata.json";
pub const PARAMETER_CURVES: &str = "parameter_curves.csv";
pub const PARAMETER_VERTICES: &str = "parameter_vertices.csv";
pub const OUTPUT_CURVES: &str = "output_curves.csv";
pub const OUTPUT_VERTICES: &str = "output_vertices.csv";
pub const SHAPE_CURVES: &str = "shape_curves.csv";
pub const HISTORY: &str = "history.csv";
pub const CHAIN: &str = "chain.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateSummary {
    pub optimizer: String,
    pub seed: u64,
    pub levels: Vec<f64>,
    pub parameter_labels: Vec<String>,
    pub theta_initial: Vec<f64>,
    pub theta_updated: Vec<f64>,
    /// Recovered parameter intervals at the lowest level.
    pub parameter_support: Vec<Interval>,
    pub measured_frequencies_hz: Vec<f64>,
    pub measured_support_hz: Vec<Interval>,
    pub initial_frequencies_hz: Vec<f64>,
    pub updated_frequencies_hz: Vec<f64>,
    pub updated_support_hz: Vec<Interval>,
    pub level_objectives: Vec<f64>,
    pub total_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesSummary {
    pub seed: u64,
    pub samples: usize,
    pub burn_in: usize,
    pub likelihood_sd: f64,
    pub acceptance_rate: f64,
    pub parameter_labels: Vec<String>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub measured_frequencies_hz: Vec<f64>,
    pub mean_frequencies_hz: Vec<f64>,
}

/// Run metadata; kept apart from the summaries so that those stay
/// byte-identical across reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub level_wall_time_s: Vec<f64>,
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    Ok(ffemu_core::scenario::write_json(path, value)?)
}

/// Reads a bundle member, naming it when it is missing.
pub fn read_member<T: DeserializeOwned>(dir: &Path, name: &str) -> CliResult<T> {
    let path = dir.join(name);
    if !path.exists() {
        return Err(CliError::MissingMember {
            member: name.to_string(),
            dir: dir.to_path_buf(),
        });
    }
    Ok(ffemu_core::scenario::read_json(&path)?)
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub quantity_id: String,
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRow {
    pub quantity_id: String,
    pub x: f64,
    pub mu: f64,
}

pub fn write_curves(path: &Path, stacks: &[(String, &AlphaCutStack)]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    for (id, stack) in stacks {
        for (alpha, iv) in stack.levels().iter().zip(stack.intervals()) {
            w.serialize(CurveRow {
                quantity_id: id.clone(),
                alpha: *alpha,
                lo: iv.lo,
                hi: iv.hi,
            })
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_vertices(path: &Path, stacks: &[(String, &AlphaCutStack)]) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    for (id, stack) in stacks {
        for v in stack.to_membership().map_err(ffemu_core::Error::from)? {
            w.serialize(VertexRow {
                quantity_id: id.clone(),
                x: v.x,
                mu: v.mu,
            })
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a header row followed by numeric records.
pub fn write_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_curves(dir: &Path, name: &str) -> CliResult<Vec<CurveRow>> {
    let path: PathBuf = dir.join(name);
    if !path.exists() {
        return Err(CliError::MissingMember {
            member: name.to_string(),
            dir: dir.to_path_buf(),
        });
    }
    let mut r = csv::Reader::from_path(&path).map_err(csv_err(&path))?;
    r.deserialize().collect::<Result<Vec<CurveRow>, _>>().map_err(csv_err(&path))
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryRow {
    pub level: usize,
    pub alpha: f64,
    pub iteration: usize,
    pub best_f: f64,
    pub mean_f: f64,
}
