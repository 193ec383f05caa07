//! Random-walk Metropolis-Hastings baseline.
//!
//! The likelihood is Gaussian in the relative eigenvalue residuals
//! `(λ_m − λ(θ)) / λ_m` and the prior is uniform on the parameter box.
//! Proposals leaving the box are rejected, so every retained sample lies
//! inside it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StructuralModel;
use crate::objective::shape_residual;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    /// Total chain length including burn-in.
    pub samples: usize,
    pub burn_in: usize,
    /// Random-walk step per parameter; defaults to 1% of the box width.
    pub proposal_sd: Option<Vec<f64>>,
    /// Standard deviation of the relative eigenvalue residuals.
    pub likelihood_sd: f64,
    /// Adds mode-shape residuals to the likelihood.
    pub include_mode_shapes: bool,
    /// Chain start; defaults to the box center.
    pub start: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            burn_in: 1_000,
            proposal_sd: None,
            likelihood_sd: 0.01,
            include_mode_shapes: false,
            start: None,
            seed: 0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.samples <= self.burn_in {
            return Err(Error::Config(format!(
                "sample count {} must exceed burn-in {}",
                self.samples, self.burn_in
            )));
        }
        if !(self.likelihood_sd > 0.0) {
            return Err(Error::Config("likelihood_sd must be positive".into()));
        }
        if let Some(sd) = &self.proposal_sd {
            if sd.len() != dim {
                return Err(Error::Config(format!("proposal_sd needs {dim} entries, found {}", sd.len())));
            }
            if sd.iter().any(|s| !(*s > 0.0)) {
                return Err(Error::Config("proposal_sd entries must be positive".into()));
            }
        }
        if let Some(s) = &self.start {
            if s.len() != dim {
                return Err(Error::Config(format!("start needs {dim} entries, found {}", s.len())));
            }
        }
        Ok(())
    }
}

/// Uniform prior box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl PriorBox {
    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.lower.len()
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(t, (lo, hi))| lo <= t && t <= hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }
}

/// Crisp modal data for the likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispMeasurements {
    /// rad²/s².
    pub eigenvalues: Vec<f64>,
    pub shapes: Option<Vec<Vec<f64>>>,
}

/// Unnormalized log posterior; `-∞` outside the prior box.
pub fn log_posterior(
    theta: &[f64],
    measured: &CrispMeasurements,
    model: &StructuralModel,
    config: &McmcConfig,
    prior: &PriorBox,
) -> Result<f64> {
    if !prior.contains(theta) {
        return Ok(f64::NEG_INFINITY);
    }
    let sol = model.modal(theta)?;
    if sol.mode_count() != measured.eigenvalues.len() {
        return Err(Error::shape("measured eigenvalues", sol.mode_count(), measured.eigenvalues.len()));
    }
    let mut sum = 0.0;
    for (j, &lm) in measured.eigenvalues.iter().enumerate() {
        let r = (lm - sol.eigenvalue(j)) / lm;
        sum += r * r;
    }
    if config.include_mode_shapes {
        if let Some(shapes) = &measured.shapes {
            for (j, phi) in shapes.iter().enumerate() {
                let r = shape_residual(phi, sol.eigenvector(j))?;
                sum += r * r;
            }
        }
    }
    Ok(-0.5 * sum / (config.likelihood_sd * config.likelihood_sd))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// Post burn-in samples.
    pub samples: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
}

/// Generic random-walk Metropolis-Hastings with Gaussian proposals.
pub fn metropolis_hastings<F>(
    log_target: F,
    start: &[f64],
    proposal_sd: &[f64],
    samples: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Chain>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if samples <= burn_in {
        return Err(Error::Config(format!("sample count {samples} must exceed burn-in {burn_in}")));
    }
    if proposal_sd.len() != start.len() {
        return Err(Error::shape("proposal_sd", start.len(), proposal_sd.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = start.to_vec();
    let mut current_lp = log_target(&current)?;
    if current_lp == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("chain start {current:?} has zero posterior density")));
    }
    let mut accepted = 0usize;
    let mut kept = Vec::with_capacity(samples - burn_in);
    let mut proposal = vec![0.0; start.len()];
    for step in 0..samples {
        for (p, (c, sd)) in proposal.iter_mut().zip(current.iter().zip(proposal_sd)) {
            let z: f64 = rng.sample(StandardNormal);
            *p = c + sd * z;
        }
        let lp = log_target(&proposal)?;
        let u: f64 = rng.random();
        if lp > f64::NEG_INFINITY && u.ln() < lp - current_lp {
            current.copy_from_slice(&proposal);
            current_lp = lp;
            accepted += 1;
        }
        if step >= burn_in {
            kept.push(current.clone());
        }
    }
    if accepted == 0 {
        return Err(Error::Diagnostics(
            "no proposal was accepted; reduce proposal_sd or check the prior box".into(),
        ));
    }
    Ok(Chain {
        samples: kept,
        acceptance_rate: accepted as f64 / samples as f64,
    })
}

pub fn mh_sample(
    config: &McmcConfig,
    model: &StructuralModel,
    measured: &CrispMeasurements,
    prior: &PriorBox,
) -> Result<Chain> {
    let d = model.parameter_count();
    config.validate(d)?;
    if prior.lower.len() != d || prior.upper.len() != d {
        return Err(Error::Config(format!("prior box needs {d} entries per bound")));
    }
    let proposal_sd = config.proposal_sd.clone().unwrap_or_else(|| {
        prior
            .lower
            .iter()
            .zip(&prior.upper)
            .map(|(l, u)| 0.01 * (u - l))
            .collect()
    });
    let start = config.start.clone().unwrap_or_else(|| prior.center());
    let chain = metropolis_hastings(
        |theta| log_posterior(theta, measured, model, config, prior),
        &start,
        &proposal_sd,
        config.samples,
        config.burn_in,
        config.seed,
    )?;
    debug_assert!(chain.samples.iter().all(|s| prior.contains(s)));
    Ok(chain)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub mean: f64,
    /// Sample standard deviation (divisor `N − 1`).
    pub sd: f64,
    /// Coefficient of variation in percent.
    pub cov_percent: f64,
}

pub fn summarize(chain: &Chain) -> Result<Vec<ParameterSummary>> {
    let n = chain.samples.len();
    let Some(first) = chain.samples.first() else {
        return Err(Error::Domain("cannot summarize an empty chain".into()));
    };
    let d = first.len();
    Ok((0..d)
        .map(|i| {
            let mean = chain.samples.iter().map(|s| s[i]).sum::<f64>() / n as f64;
            let var = if n > 1 {
                chain.samples.iter().map(|s| (s[i] - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            let sd = var.sqrt();
            ParameterSummary {
                mean,
                sd,
                cov_percent: 100.0 * sd / mean,
            }
        })
        .collect())
}
