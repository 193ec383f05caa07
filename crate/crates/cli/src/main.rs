//! `ffemu`: simulate fuzzy modal data, update fuzzy stiffness parameters,
//! run the Metropolis-Hastings baseline and render reports.

mod bundle;
mod error;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ffemu_core::bayes::{mh_sample, summarize};
use ffemu_core::model::StructuralModel;
use ffemu_core::objective::interval_modal;
use ffemu_core::pipeline::{run_ffemu, FfemuResult};
use ffemu_core::scenario::{read_json, LoadedRun, RunConfig, TruthSpec};

use crate::bundle::*;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "ffemu", version, about = "Fuzzy finite element model updating with ACO_R and PSO")]
struct Cli {
    /// Overrides the seed in the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for population evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also export mode-shape curves and per-level progress.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate fuzzy measured modal data from true parameters.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Identify fuzzy parameters level by level and write a result bundle.
    Update {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the posterior with random-walk Metropolis-Hastings.
    Bayes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the tables of a result bundle.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::Simulate { model, truth, out } => simulate(model, truth, out),
        Command::Update { config, out } => update(&cli, config, out),
        Command::Bayes { config, out } => bayes(&cli, config, out),
        Command::Report { dir } => report(dir),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn simulate(model_path: &Path, truth_path: &Path, out: &Path) -> CliResult<()> {
    let model: StructuralModel = read_json(model_path)?;
    let truth: TruthSpec = read_json(truth_path)?;
    let data = truth.simulate(&model)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_json(out, &data)?;
    let kind = if data.is_crisp() { "crisp" } else { "fuzzy" };
    println!("wrote {} {kind} modes to {}", data.mode_count(), out.display());
    for (j, f) in data.center_frequencies_hz().iter().enumerate() {
        println!("  mode {}: {} Hz", j + 1, report::sig6(*f));
    }
    Ok(())
}

fn load_run(cli: &Cli, config: &Path) -> CliResult<LoadedRun> {
    let mut loaded = RunConfig::load(config)?;
    if let Some(seed) = cli.seed {
        loaded.config.seed = seed;
        if let Some(b) = loaded.config.bayes.as_mut() {
            b.seed = seed;
        }
    }
    Ok(loaded)
}

fn theta_initial(loaded: &LoadedRun) -> Vec<f64> {
    loaded.config.theta_initial.clone().unwrap_or_else(|| loaded.prior().center())
}

fn update(cli: &Cli, config: &Path, out: &Path) -> CliResult<()> {
    let started = Instant::now();
    let loaded = load_run(cli, config)?;
    let run = loaded.ffemu_run()?;
    let result = run_ffemu(&run)?;
    ensure_dir(out)?;

    let model = &loaded.model;
    let levels = result.levels.clone();
    let initial = theta_initial(&loaded);
    let center = result.center();
    let n = model.dof();
    let measured_support_hz = (0..n)
        .map(|j| Ok(loaded.measured.frequency_stack(j, &levels)?.support()))
        .collect::<Result<Vec<_>, ffemu_core::Error>>()?;
    let summary = UpdateSummary {
        optimizer: result.optimizer.clone(),
        seed: loaded.config.seed,
        levels: levels.clone(),
        parameter_labels: result.parameter_labels.clone(),
        theta_initial: initial.clone(),
        theta_updated: center.clone(),
        parameter_support: result.support(),
        measured_frequencies_hz: loaded.measured.center_frequencies_hz(),
        measured_support_hz,
        initial_frequencies_hz: model.modal(&initial)?.frequencies_hz(),
        updated_frequencies_hz: model.modal(&center)?.frequencies_hz(),
        updated_support_hz: result.frequency_stacks.iter().map(|s| s.support()).collect(),
        level_objectives: result.outcomes.iter().map(|o| o.objective).collect(),
        total_evaluations: result.total_evaluations,
    };
    write_json(&out.join(UPDATE_SUMMARY), &summary)?;
    write_update_curves(out, &result, &loaded, cli.verbose)?;
    write_json(
        &out.join(METADATA),
        &Metadata {
            command: "update".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: loaded.config.seed,
            threads: rayon::current_num_threads(),
            wall_time_s: started.elapsed().as_secs_f64(),
            level_wall_time_s: result.outcomes.iter().map(|o| o.wall_time_s).collect(),
        },
    )?;

    if cli.verbose {
        for o in &result.outcomes {
            println!(
                "alpha {:.4}: objective {}, {} evaluations, {:.3} s",
                o.alpha,
                report::sig6(o.objective),
                o.evaluations,
                o.wall_time_s
            );
        }
    }
    print!("{}", report::render_parameters(&summary, None));
    println!();
    print!("{}", report::render_frequencies(&summary, None));
    println!(
        "{} objective evaluations over {} levels with {}",
        result.total_evaluations,
        result.levels.len(),
        summary.optimizer
    );
    if summary.optimizer == "pso" {
        println!("note: PSO evaluates its whole swarm every iteration, a larger budget than ACO's ants per iteration");
    }
    println!("bundle written to {}", out.display());
    Ok(())
}

fn write_update_curves(out: &Path, result: &FfemuResult, loaded: &LoadedRun, verbose: bool) -> CliResult<()> {
    let params: Vec<(String, _)> = result
        .parameter_labels
        .iter()
        .cloned()
        .zip(result.parameter_stacks.iter())
        .collect();
    let outputs: Vec<(String, _)> = result
        .frequency_stacks
        .iter()
        .enumerate()
        .map(|(j, s)| (format!("mode{}_hz", j + 1), s))
        .collect();
    write_curves(&out.join(PARAMETER_CURVES), &params)?;
    write_vertices(&out.join(PARAMETER_VERTICES), &params)?;
    write_curves(&out.join(OUTPUT_CURVES), &outputs)?;
    write_vertices(&out.join(OUTPUT_VERTICES), &outputs)?;
    write_rows(
        &out.join(HISTORY),
        result.outcomes.iter().enumerate().flat_map(|(k, o)| {
            o.history.iter().map(move |h| HistoryRow {
                level: k + 1,
                alpha: o.alpha,
                iteration: h.iteration,
                best_f: h.best_f,
                mean_f: h.mean_f,
            })
        }),
    )?;
    if verbose {
        // Mode-shape component ranges at every level's parameter box.
        let mut rows = Vec::new();
        for o in &result.outcomes {
            let im = interval_modal(&loaded.model, &o.solution)?;
            for j in 0..loaded.model.dof() {
                let (a, b) = (im.lower.eigenvector(j), im.upper.eigenvector(j));
                for c in 0..a.len() {
                    rows.push(CurveRow {
                        quantity_id: format!("mode{}_dof{}", j + 1, c + 1),
                        alpha: o.alpha,
                        lo: a[c].min(b[c]),
                        hi: a[c].max(b[c]),
                    });
                }
            }
        }
        write_rows(&out.join(SHAPE_CURVES), rows)?;
    }
    Ok(())
}

fn bayes(cli: &Cli, config: &Path, out: &Path) -> CliResult<()> {
    let started = Instant::now();
    let loaded = load_run(cli, config)?;
    let mcmc = loaded.mcmc_config();
    let measured = loaded.crisp_measurements();
    let chain = mh_sample(&mcmc, &loaded.model, &measured, &loaded.prior())?;
    let stats = summarize(&chain)?;
    ensure_dir(out)?;

    let labels = loaded.model.parameter_labels();
    let mean: Vec<f64> = stats.iter().map(|s| s.mean).collect();
    let summary = BayesSummary {
        seed: mcmc.seed,
        samples: mcmc.samples,
        burn_in: mcmc.burn_in,
        likelihood_sd: mcmc.likelihood_sd,
        acceptance_rate: chain.acceptance_rate,
        parameter_labels: labels.clone(),
        sd: stats.iter().map(|s| s.sd).collect(),
        measured_frequencies_hz: loaded.measured.center_frequencies_hz(),
        mean_frequencies_hz: loaded.model.modal(&mean)?.frequencies_hz(),
        mean,
    };
    let header: Vec<String> = std::iter::once("sample_index".to_string()).chain(labels).collect();
    write_table(
        &out.join(CHAIN),
        &header,
        chain
            .samples
            .iter()
            .enumerate()
            .map(|(k, s)| std::iter::once(k as f64).chain(s.iter().copied()).collect()),
    )?;
    write_json(&out.join(BAYES_SUMMARY), &summary)?;
    write_json(
        &out.join(format!("bayes_{METADATA}")),
        &Metadata {
            command: "bayes".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: mcmc.seed,
            threads: 1,
            wall_time_s: started.elapsed().as_secs_f64(),
            level_wall_time_s: Vec::new(),
        },
    )?;
    print!("{}", report::render_bayes(&summary));
    println!("bundle written to {}", out.display());
    Ok(())
}

fn report(dir: &Path) -> CliResult<()> {
    let has_update = dir.join(UPDATE_SUMMARY).exists();
    let bayes: Option<BayesSummary> = if dir.join(BAYES_SUMMARY).exists() {
        Some(read_member(dir, BAYES_SUMMARY)?)
    } else {
        None
    };
    let mut text = String::new();
    if has_update || bayes.is_none() {
        let summary: UpdateSummary = read_member(dir, UPDATE_SUMMARY)?;
        for member in [PARAMETER_CURVES, OUTPUT_CURVES] {
            if read_curves(dir, member)?.is_empty() {
                return Err(CliError::EmptyData(format!("{member} contains no curve rows")));
            }
        }
        text.push_str(&report::render_parameters(&summary, bayes.as_ref()));
        text.push('\n');
        text.push_str(&report::render_frequencies(&summary, bayes.as_ref()));
    }
    if let Some(b) = &bayes {
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&report::render_bayes(b));
    }
    let path = dir.join("report.txt");
    fs::write(&path, &text).map_err(|source| CliError::Io { path, source })?;
    print!("{text}");
    Ok(())
}
