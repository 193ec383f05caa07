//! Global-best particle swarm optimization with velocity clamping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate_batch, initial_population, mean, stagnated, IterationRecord, OptimError, OptimOutcome, SearchRegion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of each coordinate's range.
    pub v_max_fraction: f64,
    /// Take the velocity limit from the current region instead of the
    /// global box.
    pub rescale_velocity_per_level: bool,
    pub max_iterations: usize,
    pub stagnation_window: usize,
    pub stagnation_tolerance: f64,
    pub max_evaluations: Option<usize>,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 80,
            inertia: 0.729,
            cognitive: 1.494,
            social: 1.494,
            v_max_fraction: 0.5,
            rescale_velocity_per_level: false,
            max_iterations: 300,
            stagnation_window: 50,
            stagnation_tolerance: 1e-10,
            max_evaluations: None,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<(), OptimError> {
        if self.swarm_size < 2 {
            return Err(OptimError::Config(format!("swarm size must be >= 2, got {}", self.swarm_size)));
        }
        if !(self.v_max_fraction > 0.0 && self.v_max_fraction <= 1.0) {
            return Err(OptimError::Config(format!(
                "v_max_fraction must be in (0, 1], got {}",
                self.v_max_fraction
            )));
        }
        for (name, v) in [("inertia", self.inertia), ("cognitive", self.cognitive), ("social", self.social)] {
            if !v.is_finite() {
                return Err(OptimError::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Minimizes `f` over `region`. Velocities follow
/// `v ← w v + c₁ r₁ (pbest − x) + c₂ r₂ (gbest − x)`, clamped per coordinate,
/// and positions are projected after every move.
pub fn pso_minimize<F>(
    f: &F,
    region: &dyn SearchRegion,
    config: &PsoConfig,
    seeds: &[Vec<f64>],
) -> Result<OptimOutcome, OptimError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let dim = region.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let v_max: Vec<f64> = (0..dim)
        .map(|i| {
            let (lo, hi) = if config.rescale_velocity_per_level {
                region.bounds(i)
            } else {
                region.global_bounds(i)
            };
            config.v_max_fraction * (hi - lo)
        })
        .collect();

    let mut positions = initial_population(region, seeds, config.swarm_size, &mut rng)?;
    let mut velocities: Vec<Vec<f64>> = positions
        .iter()
        .map(|_| v_max.iter().map(|&vm| vm * (2.0 * rng.random::<f64>() - 1.0)).collect())
        .collect();
    let values = evaluate_batch(f, &positions)?;
    let mut evaluations = positions.len();

    let mut pbest = positions.clone();
    let mut pbest_f = values.clone();
    let mut g = argmin(&pbest_f);
    let mut history = vec![IterationRecord {
        iteration: 0,
        best_f: pbest_f[g],
        mean_f: mean(&values),
    }];

    loop {
        let iterations = history.len() - 1;
        if iterations >= config.max_iterations
            || config
                .max_evaluations
                .is_some_and(|cap| evaluations + positions.len() > cap)
            || stagnated(&history, config.stagnation_window, config.stagnation_tolerance)
        {
            break;
        }

        let gbest = pbest[g].clone();
        for (k, (x, v)) in positions.iter_mut().zip(velocities.iter_mut()).enumerate() {
            for i in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let vi = config.inertia * v[i]
                    + config.cognitive * r1 * (pbest[k][i] - x[i])
                    + config.social * r2 * (gbest[i] - x[i]);
                v[i] = vi.clamp(-v_max[i], v_max[i]);
                x[i] += v[i];
            }
            region.project(x);
        }

        let values = evaluate_batch(f, &positions)?;
        evaluations += positions.len();
        for (k, &fx) in values.iter().enumerate() {
            if fx < pbest_f[k] {
                pbest_f[k] = fx;
                pbest[k].clone_from(&positions[k]);
            }
        }
        g = argmin(&pbest_f);
        history.push(IterationRecord {
            iteration: history.len(),
            best_f: pbest_f[g],
            mean_f: mean(&values),
        });
    }

    Ok(OptimOutcome {
        best_x: pbest[g].clone(),
        best_f: pbest_f[g],
        history,
        evaluations,
    })
}

/// Index of the smallest value; the first one wins ties.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}
