//! Interval modal prediction and the per-level updating objective.
//!
//! For stiffness-only uncertainty the eigenvalues are monotone in every
//! parameter, so the bounds of each eigenvalue over a parameter box are
//! attained at the two extreme vertices `K(θ̲)` and `K(θ̄)`. The objective
//! compares those vertex predictions with the measured lower and upper
//! modal data and sums the weighted squared relative errors of both
//! branches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Interval;
use crate::linalg::{dot, norm, pair_modes, LinalgError, ModalSolution};
use crate::model::StructuralModel;
use crate::optim::SearchRegion;

/// Lower and upper bound vectors of the interval updating parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalParameters {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalParameters {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::shape("interval upper bound", lower.len(), upper.len()));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::Domain(format!(
                "parameter {i}: lower bound {} exceeds upper bound {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn degenerate(theta: Vec<f64>) -> Self {
        Self {
            lower: theta.clone(),
            upper: theta,
        }
    }

    /// Splits a decision vector laid out as `[lower..., upper...]`.
    pub fn from_decision_vector(x: &[f64]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::Shape(format!("decision vector length {} is odd", x.len())));
        }
        let d = x.len() / 2;
        Self::new(x[..d].to_vec(), x[d..].to_vec())
    }

    pub fn to_decision_vector(&self) -> Vec<f64> {
        self.lower.iter().chain(&self.upper).copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn interval(&self, i: usize) -> Interval {
        Interval {
            lo: self.lower[i],
            hi: self.upper[i],
        }
    }
}

/// Vertex solutions bounding the modal data over a parameter box.
///
/// Both solutions are re-ordered to match the modes of the box-center
/// solution and their eigenvectors are sign-aligned with it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalModal {
    pub lower: ModalSolution,
    pub upper: ModalSolution,
    pub center: ModalSolution,
}

impl IntervalModal {
    pub fn eigenvalue_interval(&self, mode: usize) -> Interval {
        Interval {
            lo: self.lower.eigenvalue(mode),
            hi: self.upper.eigenvalue(mode),
        }
    }

    pub fn eigenvalue_intervals(&self) -> Vec<Interval> {
        (0..self.center.mode_count())
            .map(|j| self.eigenvalue_interval(j))
            .collect()
    }
}

pub fn interval_modal(model: &StructuralModel, p: &IntervalParameters) -> Result<IntervalModal> {
    if p.is_degenerate() {
        let sol = model.modal(p.lower())?;
        return Ok(IntervalModal {
            lower: sol.clone(),
            upper: sol.clone(),
            center: sol,
        });
    }
    let center = model.modal(&p.center())?;
    let align = |sol: ModalSolution| -> Result<ModalSolution> {
        let order = pair_modes(&center, &sol)?;
        let mut paired = sol.permuted(&order);
        paired.align_signs(&center);
        Ok(paired)
    };
    let lower = align(model.modal(p.lower())?)?;
    let upper = align(model.modal(p.upper())?)?;
    Ok(IntervalModal { lower, upper, center })
}

/// Measured data for one mode at a single α level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredMode {
    /// Eigenvalue bounds in rad²/s².
    pub eigenvalue: Interval,
    /// Eigenvector at the lower bound; `None` drops the lower shape term.
    pub shape_lower: Option<Vec<f64>>,
    pub shape_upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredModalIntervals {
    pub modes: Vec<MeasuredMode>,
}

impl MeasuredModalIntervals {
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Measured data that an [`IntervalModal`] reproduces exactly.
    pub fn from_interval_modal(im: &IntervalModal) -> Self {
        let modes = (0..im.center.mode_count())
            .map(|j| MeasuredMode {
                eigenvalue: im.eigenvalue_interval(j),
                shape_lower: Some(im.lower.eigenvector(j).to_vec()),
                shape_upper: Some(im.upper.eigenvector(j).to_vec()),
            })
            .collect();
        Self { modes }
    }
}

/// Least-squares scale `β` minimizing `‖φ_m − β φ‖`.
pub fn beta(measured: &[f64], predicted: &[f64]) -> Result<f64> {
    if measured.len() != predicted.len() {
        return Err(Error::shape("mode shape", predicted.len(), measured.len()));
    }
    let pp = dot(predicted, predicted);
    if pp == 0.0 {
        return Err(LinalgError::DegenerateVector.into());
    }
    Ok(dot(measured, predicted) / pp)
}

/// Relative mode-shape residual `‖φ_m − βφ‖ / ‖φ_m‖`.
pub fn shape_residual(measured: &[f64], predicted: &[f64]) -> Result<f64> {
    let b = beta(measured, predicted)?;
    let denom = norm(measured);
    if denom == 0.0 {
        return Err(LinalgError::DegenerateVector.into());
    }
    let diff: Vec<f64> = measured
        .iter()
        .zip(predicted)
        .map(|(m, p)| m - b * p)
        .collect();
    Ok(norm(&diff) / denom)
}

/// Lower and upper error vectors, each `[eigenvalue errors..., shape errors...]`.
pub fn error_vectors(
    measured: &MeasuredModalIntervals,
    lower: &ModalSolution,
    upper: &ModalSolution,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = measured.mode_count();
    for sol in [lower, upper] {
        if sol.mode_count() != n {
            return Err(Error::shape("predicted modes", n, sol.mode_count()));
        }
    }
    let mut e_lo = vec![0.0; 2 * n];
    let mut e_hi = vec![0.0; 2 * n];
    for (j, m) in measured.modes.iter().enumerate() {
        let (lm, um) = (m.eigenvalue.lo, m.eigenvalue.hi);
        if lm == 0.0 || um == 0.0 {
            return Err(Error::Domain(format!("measured eigenvalue bound of mode {} is zero", j + 1)));
        }
        e_lo[j] = (lm - lower.eigenvalue(j)) / lm;
        e_hi[j] = (upper.eigenvalue(j) - um) / um;
        if let Some(phi) = &m.shape_lower {
            e_lo[n + j] = shape_residual(phi, lower.eigenvector(j))?;
        }
        if let Some(phi) = &m.shape_upper {
            e_hi[n + j] = shape_residual(phi, upper.eigenvector(j))?;
        }
    }
    Ok((e_lo, e_hi))
}

/// Diagonal weighting matrices for the lower and upper error vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightingConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl WeightingConfig {
    pub fn identity(modes: usize) -> Self {
        Self {
            lower: vec![1.0; 2 * modes],
            upper: vec![1.0; 2 * modes],
        }
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        for (name, w) in [("lower", &self.lower), ("upper", &self.upper)] {
            if w.len() != 2 * modes {
                return Err(Error::Config(format!(
                    "{name} weights need {} entries (eigenvalues then mode shapes), found {}",
                    2 * modes,
                    w.len()
                )));
            }
            if w.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::Config(format!("{name} weights must be non-negative")));
            }
        }
        Ok(())
    }
}

fn weighted_square(e: &[f64], w: &[f64]) -> f64 {
    e.iter().zip(w).map(|(e, w)| w * e * e).sum()
}

/// `e̲ᵀ W_l e̲ + ēᵀ W_u ē` for an already computed vertex prediction.
pub fn objective_from_prediction(
    prediction: &IntervalModal,
    measured: &MeasuredModalIntervals,
    weights: &WeightingConfig,
) -> Result<f64> {
    weights.validate(measured.mode_count())?;
    let (lo, hi) = error_vectors(measured, &prediction.lower, &prediction.upper)?;
    Ok(weighted_square(&lo, &weights.lower) + weighted_square(&hi, &weights.upper))
}

pub fn objective(
    model: &StructuralModel,
    p: &IntervalParameters,
    measured: &MeasuredModalIntervals,
    weights: &WeightingConfig,
) -> Result<f64> {
    let prediction = interval_modal(model, p)?;
    objective_from_prediction(&prediction, measured, weights)
}

/// Admissible interval parameters at one α level: a global box and,
/// below the top level, nesting around the previous level's solution.
///
/// As a [`SearchRegion`] it acts on decision vectors `[lower..., upper...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    theta_min: Vec<f64>,
    theta_max: Vec<f64>,
    previous: Option<IntervalParameters>,
}

impl FeasibleRegion {
    pub fn new(theta_min: Vec<f64>, theta_max: Vec<f64>, previous: Option<IntervalParameters>) -> Result<Self> {
        if theta_min.len() != theta_max.len() {
            return Err(Error::Config(format!(
                "theta_min has {} entries but theta_max has {}",
                theta_min.len(),
                theta_max.len()
            )));
        }
        if let Some(i) = (0..theta_min.len()).find(|&i| !(theta_min[i] <= theta_max[i])) {
            return Err(Error::Config(format!(
                "theta_min[{i}] = {} exceeds theta_max[{i}] = {}",
                theta_min[i], theta_max[i]
            )));
        }
        if let Some(prev) = &previous {
            if prev.dim() != theta_min.len() {
                return Err(Error::Config(format!(
                    "previous level has {} parameters, box has {}",
                    prev.dim(),
                    theta_min.len()
                )));
            }
            for i in 0..prev.dim() {
                if prev.lower[i] < theta_min[i] || prev.upper[i] > theta_max[i] {
                    return Err(Error::Config(format!(
                        "previous interval [{}, {}] of parameter {i} leaves the box [{}, {}]",
                        prev.lower[i], prev.upper[i], theta_min[i], theta_max[i]
                    )));
                }
            }
        }
        Ok(Self {
            theta_min,
            theta_max,
            previous,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.theta_min.len()
    }

    pub fn theta_min(&self) -> &[f64] {
        &self.theta_min
    }

    pub fn theta_max(&self) -> &[f64] {
        &self.theta_max
    }

    pub fn previous(&self) -> Option<&IntervalParameters> {
        self.previous.as_ref()
    }

    fn lower_range(&self, i: usize) -> (f64, f64) {
        let hi = self.previous.as_ref().map_or(self.theta_max[i], |p| p.lower[i]);
        (self.theta_min[i], hi)
    }

    fn upper_range(&self, i: usize) -> (f64, f64) {
        let lo = self.previous.as_ref().map_or(self.theta_min[i], |p| p.upper[i]);
        (lo, self.theta_max[i])
    }

    pub fn contains_parameters(&self, p: &IntervalParameters) -> bool {
        p.dim() == self.parameter_count()
            && (0..p.dim()).all(|i| {
                let (llo, lhi) = self.lower_range(i);
                let (ulo, uhi) = self.upper_range(i);
                llo <= p.lower[i] && p.lower[i] <= lhi && ulo <= p.upper[i] && p.upper[i] <= uhi && p.lower[i] <= p.upper[i]
            })
    }
}

/// Clamps a candidate into the region; crossed bounds collapse to their
/// midpoint clamped into both admissible ranges.
pub fn project_feasible(candidate: &IntervalParameters, region: &FeasibleRegion) -> Result<IntervalParameters> {
    let d = region.parameter_count();
    if candidate.dim() != d {
        return Err(Error::shape("candidate parameters", d, candidate.dim()));
    }
    let mut x = candidate.to_decision_vector();
    region.project(&mut x);
    IntervalParameters::from_decision_vector(&x)
}

impl SearchRegion for FeasibleRegion {
    fn dim(&self) -> usize {
        2 * self.parameter_count()
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        let d = self.parameter_count();
        if i < d {
            self.lower_range(i)
        } else {
            self.upper_range(i - d)
        }
    }

    fn global_bounds(&self, i: usize) -> (f64, f64) {
        let i = i % self.parameter_count();
        (self.theta_min[i], self.theta_max[i])
    }

    fn project(&self, x: &mut [f64]) {
        let d = self.parameter_count();
        for i in 0..d {
            let (llo, lhi) = self.lower_range(i);
            let (ulo, uhi) = self.upper_range(i);
            let mut lo = x[i].clamp(llo, lhi);
            let mut hi = x[d + i].clamp(ulo, uhi);
            if lo > hi {
                let mid = 0.5 * (lo + hi);
                lo = mid.clamp(llo, lhi);
                hi = mid.clamp(ulo, uhi);
                if lo > hi {
                    // Only reachable with disjoint ranges, which construction rules out.
                    hi = lo;
                }
            }
            x[i] = lo;
            x[d + i] = hi;
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        IntervalParameters::from_decision_vector(x).is_ok_and(|p| self.contains_parameters(&p))
    }
}
