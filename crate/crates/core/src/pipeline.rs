//! Fuzzy model updating by a sequence of interval optimizations.
//!
//! The top level (α = 1) is a plain deterministic update: lower and upper
//! parameter bounds coincide and are fitted to the peak measurements. Every
//! following level fits a parameter box to the measured α-cut, constrained
//! to contain the previous level's box and to stay inside the global box,
//! so the recovered membership functions are convex by construction.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{AlphaCutStack, FuzzyError, Interval, TriangularFuzzyNumber};
use crate::linalg::eigenvalue_to_hz;
use crate::measurement::{FuzzyModalData, FuzzyMode, FuzzyShape, ValueUnit};
use crate::model::StructuralModel;
use crate::objective::{interval_modal, objective, FeasibleRegion, IntervalParameters, WeightingConfig};
use crate::optim::{aco_minimize, pso_minimize, AcoConfig, BoxRegion, IterationRecord, OptimError, OptimOutcome, PsoConfig, SearchRegion};

/// Relative slack used when re-nesting propagated output bounds that
/// differ from their neighbours only by eigensolver rounding.
const OUTPUT_NESTING_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum OptimizerChoice {
    Aco(AcoConfig),
    Pso(PsoConfig),
}

impl OptimizerChoice {
    pub const NAMES: [&'static str; 2] = ["aco", "pso"];

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerChoice::Aco(_) => "aco",
            OptimizerChoice::Pso(_) => "pso",
        }
    }

    fn minimize<F>(&self, f: &F, region: &dyn SearchRegion, seeds: &[Vec<f64>], seed: u64) -> std::result::Result<OptimOutcome, OptimError>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        match self {
            OptimizerChoice::Aco(c) => aco_minimize(f, region, &AcoConfig { seed, ..c.clone() }, seeds),
            OptimizerChoice::Pso(c) => pso_minimize(f, region, &PsoConfig { seed, ..c.clone() }, seeds),
        }
    }
}

/// A complete updating problem.
#[derive(Debug, Clone)]
pub struct FfemuRun {
    pub model: StructuralModel,
    pub measured: FuzzyModalData,
    pub levels: Vec<f64>,
    pub optimizer: OptimizerChoice,
    pub theta_min: Vec<f64>,
    pub theta_max: Vec<f64>,
    pub weights: Option<WeightingConfig>,
    /// Optional starting guess added to the top-level population.
    pub initial: Option<Vec<f64>>,
    pub seed: u64,
}

impl FfemuRun {
    pub fn validate(&self) -> Result<()> {
        let d = self.model.parameter_count();
        if self.theta_min.len() != d || self.theta_max.len() != d {
            return Err(Error::Config(format!(
                "model has {d} updating parameters but the bounds have {} and {} entries",
                self.theta_min.len(),
                self.theta_max.len()
            )));
        }
        if let Some(i) = (0..d).find(|&i| !(self.theta_min[i] < self.theta_max[i])) {
            return Err(Error::Config(format!(
                "theta_min[{i}] = {} must be below theta_max[{i}] = {}",
                self.theta_min[i], self.theta_max[i]
            )));
        }
        if !(self.theta_min.iter().all(|v| *v > 0.0)) {
            return Err(Error::Config("stiffness bounds must be positive".into()));
        }
        // Reuses the schedule validation of the stack type.
        TriangularFuzzyNumber::crisp(1.0).to_stack(&self.levels)?;
        self.measured.validate()?;
        if self.measured.mode_count() != self.model.dof() {
            return Err(Error::Config(format!(
                "measured data cover {} modes, model has {}",
                self.measured.mode_count(),
                self.model.dof()
            )));
        }
        if let Some(w) = &self.weights {
            w.validate(self.model.dof())?;
        }
        if let Some(init) = &self.initial {
            if init.len() != d {
                return Err(Error::shape("initial parameters", d, init.len()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub alpha: f64,
    pub solution: IntervalParameters,
    pub objective: f64,
    /// Objective of the previous level's solution against this level's data.
    pub warm_start_objective: Option<f64>,
    pub evaluations: usize,
    /// Objective calls counted independently of the optimizer.
    pub objective_calls: usize,
    pub wall_time_s: f64,
    pub history: Vec<IterationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfemuResult {
    pub optimizer: String,
    pub parameter_labels: Vec<String>,
    pub levels: Vec<f64>,
    pub outcomes: Vec<LevelOutcome>,
    pub parameter_stacks: Vec<AlphaCutStack>,
    /// Per mode, rad²/s².
    pub eigenvalue_stacks: Vec<AlphaCutStack>,
    /// Per mode, Hz.
    pub frequency_stacks: Vec<AlphaCutStack>,
    pub total_evaluations: usize,
}

impl FfemuResult {
    /// Peak (α = 1) parameter values.
    pub fn center(&self) -> Vec<f64> {
        self.parameter_stacks.iter().map(|s| s.core().lo).collect()
    }

    /// Parameter intervals at the smallest α level.
    pub fn support(&self) -> Vec<Interval> {
        self.parameter_stacks.iter().map(|s| s.support()).collect()
    }

    /// Sum of the final objective values over all levels.
    pub fn total_objective(&self) -> f64 {
        self.outcomes.iter().map(|o| o.objective).sum()
    }
}

/// Simulated fuzzy measurements from symmetric triangular parameters
/// `θ_true ± spreads`.
///
/// At every level the parameter cut is propagated with vertex solves; the
/// peak is the crisp solution at `θ_true` and each side of the output
/// triangle is the least-squares slope through the propagated bounds.
/// Mode shapes are fitted the same way, component by component.
pub fn simulate_measurements(
    model: &StructuralModel,
    theta_true: &[f64],
    spreads: &[f64],
    levels: &[f64],
    unit: ValueUnit,
) -> Result<FuzzyModalData> {
    model.check_theta(theta_true)?;
    if spreads.len() != theta_true.len() {
        return Err(Error::shape("spreads", theta_true.len(), spreads.len()));
    }
    if let Some(i) = (0..spreads.len()).find(|&i| !(spreads[i] >= 0.0 && spreads[i] < theta_true[i])) {
        return Err(Error::Domain(format!(
            "spread {i} must be in [0, theta) to keep stiffness positive, got {}",
            spreads[i]
        )));
    }
    let tfns = theta_true
        .iter()
        .zip(spreads)
        .map(|(t, s)| TriangularFuzzyNumber::symmetric(*t, *s))
        .collect::<std::result::Result<Vec<_>, FuzzyError>>()?;
    // Validates the schedule.
    tfns[0].to_stack(levels)?;

    let center = model.modal(theta_true)?;
    let n = model.dof();
    let crisp = spreads.iter().all(|s| *s == 0.0);
    if crisp {
        let modes = (0..n)
            .map(|j| FuzzyMode {
                value: TriangularFuzzyNumber::crisp(unit.from_eigenvalue(center.eigenvalue(j))),
                crisp: true,
                shape: Some(FuzzyShape::crisp(center.eigenvector(j).to_vec())),
            })
            .collect();
        return Ok(FuzzyModalData { unit, modes });
    }

    // Per level: (1 - α, lower vertex, upper vertex).
    let mut samples = Vec::with_capacity(levels.len());
    for &alpha in levels {
        let lower: Vec<f64> = tfns.iter().map(|t| t.alpha_cut(alpha).map(|iv| iv.lo)).collect::<std::result::Result<_, _>>()?;
        let upper: Vec<f64> = tfns.iter().map(|t| t.alpha_cut(alpha).map(|iv| iv.hi)).collect::<std::result::Result<_, _>>()?;
        let im = interval_modal(model, &IntervalParameters::new(lower, upper)?)?;
        samples.push((1.0 - alpha, im));
    }
    let denom: f64 = samples.iter().map(|(t, _)| t * t).sum();
    let slope = |offsets: &mut dyn Iterator<Item = (f64, f64)>| -> f64 {
        if denom == 0.0 {
            0.0
        } else {
            offsets.map(|(t, d)| t * d).sum::<f64>() / denom
        }
    };

    let modes = (0..n)
        .map(|j| {
            let peak = unit.from_eigenvalue(center.eigenvalue(j));
            let left = slope(&mut samples.iter().map(|(t, im)| (*t, peak - unit.from_eigenvalue(im.lower.eigenvalue(j))))).max(0.0);
            let right = slope(&mut samples.iter().map(|(t, im)| (*t, unit.from_eigenvalue(im.upper.eigenvalue(j)) - peak))).max(0.0);
            let phi = center.eigenvector(j);
            let branch = |pick: &dyn Fn(&crate::objective::IntervalModal) -> Vec<f64>| -> Vec<f64> {
                (0..phi.len())
                    .map(|c| phi[c] + slope(&mut samples.iter().map(|(t, im)| (*t, pick(im)[c] - phi[c]))))
                    .collect()
            };
            let lower = branch(&|im| im.lower.eigenvector(j).to_vec());
            let upper = branch(&|im| im.upper.eigenvector(j).to_vec());
            Ok(FuzzyMode {
                value: TriangularFuzzyNumber::new(peak - left, peak, peak + right)?,
                crisp: false,
                shape: Some(FuzzyShape {
                    peak: phi.to_vec(),
                    lower: Some(lower),
                    upper: Some(upper),
                }),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FuzzyModalData { unit, modes })
}

/// Eigenvalue α-cut stacks (rad²/s²) of every mode for nested parameter stacks.
pub fn propagate_outputs(model: &StructuralModel, stacks: &[AlphaCutStack]) -> Result<Vec<AlphaCutStack>> {
    let d = model.parameter_count();
    if stacks.len() != d {
        return Err(Error::shape("parameter stacks", d, stacks.len()));
    }
    let levels = stacks[0].levels().to_vec();
    if stacks.iter().any(|s| s.levels() != levels.as_slice()) {
        return Err(Error::Config("parameter stacks use different alpha levels".into()));
    }
    let n = model.dof();
    let mut per_mode: Vec<Vec<Interval>> = vec![Vec::with_capacity(levels.len()); n];
    for k in 0..levels.len() {
        let lower = stacks.iter().map(|s| s.intervals()[k].lo).collect();
        let upper = stacks.iter().map(|s| s.intervals()[k].hi).collect();
        let im = interval_modal(model, &IntervalParameters::new(lower, upper)?)?;
        for (j, iv) in im.eigenvalue_intervals().into_iter().enumerate() {
            per_mode[j].push(iv);
        }
    }
    per_mode
        .into_iter()
        .map(|mut ivs| {
            for k in 1..ivs.len() {
                let prev = ivs[k - 1];
                let cur = &mut ivs[k];
                let slack = OUTPUT_NESTING_SLACK * prev.hi.abs().max(prev.lo.abs());
                if cur.lo > prev.lo && cur.lo - prev.lo <= slack {
                    cur.lo = prev.lo;
                }
                if cur.hi < prev.hi && prev.hi - cur.hi <= slack {
                    cur.hi = prev.hi;
                }
            }
            Ok(AlphaCutStack::new(levels.clone(), ivs)?)
        })
        .collect()
}

fn assemble_result(
    run: &FfemuRun,
    outcomes: Vec<LevelOutcome>,
) -> Result<FfemuResult> {
    let levels: Vec<f64> = outcomes.iter().map(|o| o.alpha).collect();
    let d = run.model.parameter_count();
    let (parameter_stacks, eigenvalue_stacks, frequency_stacks) = if outcomes.is_empty() {
        (Vec::new(), Vec::new(), Vec::new())
    } else {
        let parameter_stacks = (0..d)
            .map(|i| AlphaCutStack::new(levels.clone(), outcomes.iter().map(|o| o.solution.interval(i)).collect()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let eigenvalue_stacks = propagate_outputs(&run.model, &parameter_stacks)?;
        let frequency_stacks = eigenvalue_stacks
            .iter()
            .map(|s| s.map_monotone(eigenvalue_to_hz))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        (parameter_stacks, eigenvalue_stacks, frequency_stacks)
    };
    Ok(FfemuResult {
        optimizer: run.optimizer.name().to_string(),
        parameter_labels: run.model.parameter_labels(),
        levels,
        total_evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        outcomes,
        parameter_stacks,
        eigenvalue_stacks,
        frequency_stacks,
    })
}

fn level_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs every α level in order and assembles the membership functions.
pub fn run_ffemu(run: &FfemuRun) -> Result<FfemuResult> {
    run.validate()?;
    let d = run.model.parameter_count();
    let weights = run
        .weights
        .clone()
        .unwrap_or_else(|| WeightingConfig::identity(run.model.dof()));

    let mut outcomes: Vec<LevelOutcome> = Vec::with_capacity(run.levels.len());
    for (index, &alpha) in run.levels.iter().enumerate() {
        let started = Instant::now();
        let level = (|| -> Result<LevelOutcome> {
            let measured = run.measured.cut(alpha)?;
            let calls = AtomicUsize::new(0);
            let failure: Mutex<Option<Error>> = Mutex::new(None);
            let eval = |p: IntervalParameters| -> f64 {
                calls.fetch_add(1, Ordering::Relaxed);
                match objective(&run.model, &p, &measured, &weights) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.lock().expect("poisoned").get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            let seed = level_seed(run.seed, index);
            let previous = outcomes.last().map(|o| o.solution.clone());

            let (outcome, solution, warm_start_objective) = match &previous {
                None => {
                    let region = BoxRegion::new(run.theta_min.clone(), run.theta_max.clone())?;
                    let seeds: Vec<Vec<f64>> = run.initial.iter().cloned().collect();
                    let f = |x: &[f64]| eval(IntervalParameters::degenerate(x.to_vec()));
                    let out = run.optimizer.minimize(&f, &region, &seeds, seed);
                    let out = recover_failure(out, &failure)?;
                    let solution = IntervalParameters::degenerate(out.best_x.clone());
                    (out, solution, None)
                }
                Some(prev) => {
                    let region = FeasibleRegion::new(run.theta_min.clone(), run.theta_max.clone(), Some(prev.clone()))?;
                    let warm = objective(&run.model, prev, &measured, &weights)?;
                    let f = |x: &[f64]| match IntervalParameters::from_decision_vector(x) {
                        Ok(p) => eval(p),
                        Err(e) => {
                            failure.lock().expect("poisoned").get_or_insert(e);
                            f64::NAN
                        }
                    };
                    let out = run.optimizer.minimize(&f, &region, &[prev.to_decision_vector()], seed);
                    let out = recover_failure(out, &failure)?;
                    let solution = IntervalParameters::from_decision_vector(&out.best_x)?;
                    (out, solution, Some(warm))
                }
            };
            debug_assert_eq!(solution.dim(), d);
            Ok(LevelOutcome {
                alpha,
                solution,
                objective: outcome.best_f,
                warm_start_objective,
                evaluations: outcome.evaluations,
                objective_calls: calls.load(Ordering::Relaxed),
                wall_time_s: started.elapsed().as_secs_f64(),
                history: outcome.history,
            })
        })();
        match level {
            Ok(o) => outcomes.push(o),
            Err(source) => {
                let partial = assemble_result(run, outcomes)?;
                return Err(Error::Level {
                    index,
                    level: alpha,
                    source: Box::new(source),
                    partial: Box::new(partial),
                });
            }
        }
    }
    assemble_result(run, outcomes)
}

fn recover_failure(
    out: std::result::Result<OptimOutcome, OptimError>,
    failure: &Mutex<Option<Error>>,
) -> Result<OptimOutcome> {
    match out {
        Ok(o) => Ok(o),
        Err(e) => match failure.lock().expect("poisoned").take() {
            Some(original) => Err(original),
            None => Err(e.into()),
        },
    }
}
