//! Ant colony optimization for continuous domains (ACO_R).
//!
//! A sorted archive of the `Q` best solutions found so far defines, per
//! coordinate, a Gaussian mixture: one kernel per archive row, centered on
//! that row's coordinate, with a width equal to `ξ` times the mean distance
//! to the other rows and a weight that decays with the row's rank. Each
//! iteration `P` ants sample new solutions from the mixture; the archive
//! then keeps the best `Q` of old and new.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{evaluate_batch, initial_population, mean, stagnated, IterationRecord, OptimError, OptimOutcome, SearchRegion};

/// How an ant picks archive rows to sample around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuideSelection {
    /// A fresh row for every coordinate.
    #[default]
    PerDimension,
    /// One row per ant, used for all coordinates.
    PerAnt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcoConfig {
    /// Archive size `Q`.
    #[serde(alias = "Q")]
    pub archive_size: usize,
    /// New solutions per iteration `P`.
    #[serde(alias = "P")]
    pub ants: usize,
    /// Spread of the rank weights.
    pub q: f64,
    /// Kernel width scale.
    pub xi: f64,
    pub max_iterations: usize,
    pub stagnation_window: usize,
    pub stagnation_tolerance: f64,
    pub max_evaluations: Option<usize>,
    pub guide_selection: GuideSelection,
    pub seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        Self {
            archive_size: 10,
            ants: 20,
            q: 0.5,
            xi: 1.0,
            max_iterations: 300,
            stagnation_window: 50,
            stagnation_tolerance: 1e-10,
            max_evaluations: None,
            guide_selection: GuideSelection::PerDimension,
            seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<(), OptimError> {
        if self.archive_size < 2 {
            return Err(OptimError::Config(format!("archive size Q must be >= 2, got {}", self.archive_size)));
        }
        if self.ants < 1 {
            return Err(OptimError::Config("at least one ant is required".into()));
        }
        if !(self.q > 0.0) {
            return Err(OptimError::Config(format!("q must be positive, got {}", self.q)));
        }
        if !(self.xi > 0.0) {
            return Err(OptimError::Config(format!("xi must be positive, got {}", self.xi)));
        }
        Ok(())
    }
}

/// Rank weights `w_r = exp(-(r-1)² / (2q²Q²)) / (qQ√(2π))` for ranks `1..=Q`.
pub fn aco_weights(archive_size: usize, q: f64) -> Vec<f64> {
    let qq = q * archive_size as f64;
    let norm = 1.0 / (qq * (2.0 * std::f64::consts::PI).sqrt());
    (0..archive_size)
        .map(|r| {
            let r = r as f64;
            norm * (-(r * r) / (2.0 * qq * qq)).exp()
        })
        .collect()
}

pub fn selection_probabilities(weights: &[f64]) -> Result<Vec<f64>, OptimError> {
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(OptimError::Domain("selection weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(OptimError::DegenerateDistribution);
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRow {
    pub x: Vec<f64>,
    pub f: f64,
}

/// The `Q` best solutions seen so far, sorted by ascending objective.
/// Ties keep insertion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionArchive {
    capacity: usize,
    rows: Vec<ArchiveRow>,
}

impl SolutionArchive {
    /// Builds a full archive from at least `capacity` evaluated points.
    pub fn from_evaluated(capacity: usize, points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self, OptimError> {
        if points.len() < capacity {
            return Err(OptimError::Domain(format!(
                "archive of size {capacity} needs at least {capacity} points, got {}",
                points.len()
            )));
        }
        let mut archive = Self {
            capacity,
            rows: Vec::with_capacity(capacity + points.len()),
        };
        archive.offer(points, values);
        Ok(archive)
    }

    /// Merges new solutions and keeps the best `capacity`.
    pub fn offer(&mut self, points: Vec<Vec<f64>>, values: Vec<f64>) {
        self.rows
            .extend(points.into_iter().zip(values).map(|(x, f)| ArchiveRow { x, f }));
        // Stable: existing rows precede new ones with equal f.
        self.rows.sort_by(|a, b| a.f.total_cmp(&b.f));
        self.rows.truncate(self.capacity);
    }

    pub fn rows(&self) -> &[ArchiveRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn best(&self) -> &ArchiveRow {
        &self.rows[0]
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.x.len())
    }
}

/// Kernel width `σ = ξ Σ_r |x_r,i − x_j,i| / (Q − 1)` for row `j`, coordinate `i`.
pub fn aco_sigma(archive: &SolutionArchive, i: usize, j: usize, xi: f64) -> Result<f64, OptimError> {
    let q = archive.len();
    if q < 2 {
        return Err(OptimError::Domain(format!("kernel width needs at least 2 archive rows, got {q}")));
    }
    let center = archive.rows[j].x[i];
    let spread: f64 = archive.rows.iter().map(|r| (r.x[i] - center).abs()).sum();
    Ok(xi * spread / (q - 1) as f64)
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

/// Samples `P` new solutions from the archive's Gaussian kernels and
/// projects them onto `region`.
pub fn aco_construct(
    archive: &SolutionArchive,
    config: &AcoConfig,
    region: &dyn SearchRegion,
    rng: &mut dyn RngCore,
) -> Result<Vec<Vec<f64>>, OptimError> {
    let q = archive.len();
    let dim = archive.dim();
    let probabilities = selection_probabilities(&aco_weights(q, config.q))?;
    let cumulative: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    let mut sigma = vec![0.0; q * dim];
    for j in 0..q {
        for i in 0..dim {
            sigma[j * dim + i] = aco_sigma(archive, i, j, config.xi)?;
        }
    }

    let mut ants = Vec::with_capacity(config.ants);
    for _ in 0..config.ants {
        let ant_row = match config.guide_selection {
            GuideSelection::PerAnt => pick(&cumulative, rng.random::<f64>()),
            GuideSelection::PerDimension => 0,
        };
        let mut x = Vec::with_capacity(dim);
        for i in 0..dim {
            let j = match config.guide_selection {
                GuideSelection::PerDimension => pick(&cumulative, rng.random::<f64>()),
                GuideSelection::PerAnt => ant_row,
            };
            let z: f64 = rng.sample(StandardNormal);
            x.push(archive.rows[j].x[i] + sigma[j * dim + i] * z);
        }
        region.project(&mut x);
        ants.push(x);
    }
    Ok(ants)
}

/// Step-wise ACO_R driver; [`aco_minimize`] runs it to completion.
pub struct AcoRunner<'a, F> {
    f: &'a F,
    region: &'a dyn SearchRegion,
    config: AcoConfig,
    rng: ChaCha8Rng,
    archive: SolutionArchive,
    history: Vec<IterationRecord>,
    evaluations: usize,
}

impl<'a, F> AcoRunner<'a, F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    /// Evaluates the seeds plus uniform random points (at least `Q` in
    /// total) and fills the archive.
    pub fn new(f: &'a F, region: &'a dyn SearchRegion, config: &AcoConfig, seeds: &[Vec<f64>]) -> Result<Self, OptimError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let points = initial_population(region, seeds, config.archive_size, &mut rng)?;
        let values = evaluate_batch(f, &points)?;
        let evaluations = points.len();
        let mean_f = mean(&values);
        let archive = SolutionArchive::from_evaluated(config.archive_size, points, values)?;
        let history = vec![IterationRecord {
            iteration: 0,
            best_f: archive.best().f,
            mean_f,
        }];
        Ok(Self {
            f,
            region,
            config: config.clone(),
            rng,
            archive,
            history,
            evaluations,
        })
    }

    pub fn archive(&self) -> &SolutionArchive {
        &self.archive
    }

    pub fn history(&self) -> &[IterationRecord] {
        &self.history
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Runs one construct/evaluate/update cycle against the archive as it
    /// stood at the start of the iteration. Returns the evaluated batch.
    pub fn step(&mut self) -> Result<(Vec<Vec<f64>>, Vec<f64>), OptimError> {
        let ants = aco_construct(&self.archive, &self.config, self.region, &mut self.rng)?;
        let values = evaluate_batch(self.f, &ants)?;
        self.evaluations += ants.len();
        self.archive.offer(ants.clone(), values.clone());
        self.history.push(IterationRecord {
            iteration: self.history.len(),
            best_f: self.archive.best().f,
            mean_f: mean(&values),
        });
        Ok((ants, values))
    }

    fn should_stop(&self) -> bool {
        let iterations = self.history.len() - 1;
        iterations >= self.config.max_iterations
            || self
                .config
                .max_evaluations
                .is_some_and(|cap| self.evaluations + self.config.ants > cap)
            || stagnated(&self.history, self.config.stagnation_window, self.config.stagnation_tolerance)
    }

    pub fn run(mut self) -> Result<OptimOutcome, OptimError> {
        while !self.should_stop() {
            self.step()?;
        }
        let best = self.archive.best().clone();
        Ok(OptimOutcome {
            best_x: best.x,
            best_f: best.f,
            history: self.history,
            evaluations: self.evaluations,
        })
    }
}

pub fn aco_minimize<F>(
    f: &F,
    region: &dyn SearchRegion,
    config: &AcoConfig,
    seeds: &[Vec<f64>],
) -> Result<OptimOutcome, OptimError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    AcoRunner::new(f, region, config, seeds)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::BoxRegion;

    fn archive_1d(values: &[f64]) -> SolutionArchive {
        let points = values.iter().map(|v| vec![*v]).collect();
        SolutionArchive::from_evaluated(values.len(), points, (0..values.len()).map(|k| k as f64).collect()).unwrap()
    }

    #[test]
    fn weights_examples() {
        let w = aco_weights(10, 0.5);
        assert!((w[0] - 1.0 / (5.0 * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-16);
        assert!((w[0] - 0.0797885).abs() < 1e-7);
        assert_eq!(w.len(), 10);
        assert!(w.windows(2).all(|p| p[0] > p[1] && p[1] > 0.0));
        let single = aco_weights(1, 0.3);
        assert!((single[0] - 1.0 / (0.3 * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn probability_examples() {
        assert_eq!(selection_probabilities(&[2.0, 2.0, 2.0, 2.0]).unwrap(), vec![0.25; 4]);
        assert_eq!(selection_probabilities(&[3.0, 1.0]).unwrap(), vec![0.75, 0.25]);
        assert_eq!(selection_probabilities(&[0.0, 0.0]), Err(OptimError::DegenerateDistribution));
    }

    #[test]
    fn sigma_examples() {
        let a = archive_1d(&[0.0, 2.0]);
        assert_eq!(aco_sigma(&a, 0, 0, 1.0).unwrap(), 2.0);
        assert_eq!(aco_sigma(&a, 0, 0, 2.0).unwrap(), 4.0);
        let flat = archive_1d(&[1.5, 1.5, 1.5]);
        assert_eq!(aco_sigma(&flat, 0, 1, 1.0).unwrap(), 0.0);
        let one = SolutionArchive::from_evaluated(1, vec![vec![0.0]], vec![0.0]).unwrap();
        assert!(aco_sigma(&one, 0, 0, 1.0).is_err());
    }

    #[test]
    fn collapsed_archive_reproduces_its_point() {
        let a = archive_1d(&[0.7, 0.7, 0.7]);
        let region = BoxRegion::cube(1, -10.0, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let config = AcoConfig {
            archive_size: 3,
            ..AcoConfig::default()
        };
        let ants = aco_construct(&a, &config, &region, &mut rng).unwrap();
        assert_eq!(ants.len(), 20);
        assert!(ants.iter().all(|x| x == &vec![0.7]));
    }

    #[test]
    fn candidates_stay_in_region() {
        let a = archive_1d(&[0.0, 2.0]);
        let region = BoxRegion::cube(1, 0.5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let config = AcoConfig {
            archive_size: 2,
            ants: 500,
            ..AcoConfig::default()
        };
        let ants = aco_construct(&a, &config, &region, &mut rng).unwrap();
        assert!(ants.iter().all(|x| region.contains(x)));
    }

    #[test]
    fn archive_keeps_best_with_stable_ties() {
        let mut a = SolutionArchive::from_evaluated(2, vec![vec![1.0], vec![2.0], vec![3.0]], vec![5.0, 1.0, 5.0]).unwrap();
        assert_eq!(a.rows().iter().map(|r| r.x[0]).collect::<Vec<_>>(), vec![2.0, 1.0]);
        a.offer(vec![vec![9.0]], vec![5.0]);
        assert_eq!(a.rows().iter().map(|r| r.x[0]).collect::<Vec<_>>(), vec![2.0, 1.0]);
        a.offer(vec![vec![8.0]], vec![0.5]);
        assert_eq!(a.rows().iter().map(|r| r.x[0]).collect::<Vec<_>>(), vec![8.0, 2.0]);
    }

    #[test]
    fn constant_objective_gives_flat_history() {
        let region = BoxRegion::cube(3, -1.0, 1.0).unwrap();
        let config = AcoConfig {
            max_iterations: 20,
            ..AcoConfig::default()
        };
        let out = aco_minimize(&|_: &[f64]| 4.0, &region, &config, &[]).unwrap();
        assert_eq!(out.best_f, 4.0);
        assert!(out.history.iter().all(|h| h.best_f == 4.0));
        assert!(region.contains(&out.best_x));
    }

    #[test]
    fn invalid_config_rejected() {
        let region = BoxRegion::cube(1, 0.0, 1.0).unwrap();
        let bad = AcoConfig {
            archive_size: 1,
            ..AcoConfig::default()
        };
        assert!(matches!(aco_minimize(&|x: &[f64]| x[0], &region, &bad, &[]), Err(OptimError::Config(_))));
    }

    #[test]
    fn evaluation_budget_is_respected() {
        let region = BoxRegion::cube(2, -1.0, 1.0).unwrap();
        let config = AcoConfig {
            max_evaluations: Some(95),
            stagnation_window: 0,
            ..AcoConfig::default()
        };
        let out = aco_minimize(&|x: &[f64]| x[0] * x[0] + x[1] * x[1], &region, &config, &[]).unwrap();
        // 10 initial + 4 iterations of 20 ants.
        assert_eq!(out.evaluations, 90);
    }
}
