//! Population-based minimizers over projected search regions.
//!
//! Both optimizers keep every evaluated point feasible by projecting it
//! onto a [`SearchRegion`] before evaluation. Candidate generation is
//! sequential and seeded; evaluation of a batch may run in parallel and
//! results are gathered in order, so runs are bit-reproducible.

mod aco;
mod pso;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aco::{
    aco_construct, aco_minimize, aco_sigma, aco_weights, selection_probabilities, AcoConfig, AcoRunner, ArchiveRow,
    GuideSelection, SolutionArchive,
};
pub use pso::{pso_minimize, PsoConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("objective returned a non-finite value {value} at x = {x:?}")]
    NonFinite { x: Vec<f64>, value: f64 },
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error("all selection weights are zero")]
    DegenerateDistribution,
    #[error("domain error: {0}")]
    Domain(String),
}

/// A set of admissible points with a projection onto it.
pub trait SearchRegion: Sync {
    fn dim(&self) -> usize;

    /// Current admissible range of coordinate `i`.
    fn bounds(&self, i: usize) -> (f64, f64);

    /// Outermost range of coordinate `i`; used for fixed velocity limits.
    fn global_bounds(&self, i: usize) -> (f64, f64) {
        self.bounds(i)
    }

    /// Maps `x` onto the region in place. Must be idempotent.
    fn project(&self, x: &mut [f64]);

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().enumerate().all(|(i, v)| {
                let (lo, hi) = self.bounds(i);
                lo <= *v && *v <= hi
            })
    }

    /// Uniform draw from the bounding box, projected.
    fn sample_uniform(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.dim())
            .map(|i| {
                let (lo, hi) = self.bounds(i);
                lo + (hi - lo) * rng.random::<f64>()
            })
            .collect();
        self.project(&mut x);
        x
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, OptimError> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(OptimError::Domain(format!(
                "box bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] <= upper[i])) {
            return Err(OptimError::Domain(format!("box lower[{i}] exceeds upper[{i}]")));
        }
        Ok(Self { lower, upper })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, OptimError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }
}

impl SearchRegion for BoxRegion {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        (self.lower[i], self.upper[i])
    }

    fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }
}

/// A box with separate, wider bounds reported as the global range.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedBox {
    pub inner: BoxRegion,
    pub outer: BoxRegion,
}

impl SearchRegion for NestedBox {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        self.inner.bounds(i)
    }

    fn global_bounds(&self, i: usize) -> (f64, f64) {
        self.outer.bounds(i)
    }

    fn project(&self, x: &mut [f64]) {
        self.inner.project(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_f: f64,
    /// Mean objective of the points evaluated in this iteration.
    pub mean_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimOutcome {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    /// Entry 0 is the initial population; one entry per iteration after.
    pub history: Vec<IterationRecord>,
    pub evaluations: usize,
}

pub(crate) fn evaluate_batch<F>(f: &F, points: &[Vec<f64>]) -> Result<Vec<f64>, OptimError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = points.par_iter().map(|x| f(x)).collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(OptimError::NonFinite {
            x: points[k].clone(),
            value: values[k],
        });
    }
    Ok(values)
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Stop when the best value improved by less than `tolerance` over the
/// last `window` iterations. A zero window disables the rule.
pub(crate) fn stagnated(history: &[IterationRecord], window: usize, tolerance: f64) -> bool {
    if window == 0 || history.len() <= window {
        return false;
    }
    let now = history[history.len() - 1].best_f;
    let then = history[history.len() - 1 - window].best_f;
    then - now < tolerance
}

pub(crate) fn initial_population(
    region: &dyn SearchRegion,
    seeds: &[Vec<f64>],
    size: usize,
    rng: &mut dyn rand::RngCore,
) -> Result<Vec<Vec<f64>>, OptimError> {
    let mut points = Vec::with_capacity(size.max(seeds.len()));
    for s in seeds {
        if s.len() != region.dim() {
            return Err(OptimError::Domain(format!(
                "seed has dimension {}, region has {}",
                s.len(),
                region.dim()
            )));
        }
        let mut x = s.clone();
        region.project(&mut x);
        points.push(x);
    }
    while points.len() < size {
        points.push(region.sample_uniform(rng));
    }
    Ok(points)
}
