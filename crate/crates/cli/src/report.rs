//! Text tables rendered from a result bundle.

use std::fmt::Write;

use ffemu_core::fuzzy::Interval;

use crate::bundle::{BayesSummary, UpdateSummary};

/// Formats `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=9).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn interval(iv: &Interval) -> String {
    format!("[{}, {}]", sig6(iv.lo), sig6(iv.hi))
}

pub fn percent_error(predicted: f64, measured: f64) -> f64 {
    100.0 * (predicted - measured).abs() / measured.abs()
}

/// Mean of the per-mode percent errors.
pub fn total_average_error(predicted: &[f64], measured: &[f64]) -> f64 {
    predicted
        .iter()
        .zip(measured)
        .map(|(p, m)| percent_error(*p, *m))
        .sum::<f64>()
        / measured.len() as f64
}

fn row(out: &mut String, cells: &[String], widths: &[usize]) {
    let line: Vec<String> = cells
        .iter()
        .zip(widths)
        .map(|(c, w)| format!("{c:>w$}"))
        .collect();
    let _ = writeln!(out, "{}", line.join("  ").trim_end());
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    row(out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>(), &widths);
    let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    let _ = writeln!(out, "{}", "-".repeat(total));
    for r in rows {
        row(out, r, &widths);
    }
}

pub fn render_parameters(summary: &UpdateSummary, bayes: Option<&BayesSummary>) -> String {
    let mut out = String::new();
    let method = summary.optimizer.to_uppercase();
    let _ = writeln!(out, "Updating parameters (N/m)");
    let mut header = vec![
        "parameter".to_string(),
        "initial".to_string(),
        format!("{method} center"),
        format!("{method} support"),
    ];
    if bayes.is_some() {
        header.extend(["M-H mean".to_string(), "M-H c.o.v. %".to_string()]);
    }
    let rows: Vec<Vec<String>> = (0..summary.parameter_labels.len())
        .map(|i| {
            let mut r = vec![
                summary.parameter_labels[i].clone(),
                sig6(summary.theta_initial[i]),
                sig6(summary.theta_updated[i]),
                interval(&summary.parameter_support[i]),
            ];
            if let Some(b) = bayes {
                r.push(sig6(b.mean[i]));
                r.push(sig6(100.0 * b.sd[i] / b.mean[i]));
            }
            r
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    table(&mut out, &header, &rows);
    out
}

pub fn render_frequencies(summary: &UpdateSummary, bayes: Option<&BayesSummary>) -> String {
    let mut out = String::new();
    let method = summary.optimizer.to_uppercase();
    let measured = &summary.measured_frequencies_hz;
    let _ = writeln!(out, "Natural frequencies (Hz)");
    let mut header = vec![
        "mode".to_string(),
        "measured".to_string(),
        "initial".to_string(),
        "error %".to_string(),
        format!("{method} center"),
        "error %".to_string(),
        format!("{method} support"),
        "measured support".to_string(),
    ];
    if bayes.is_some() {
        header.extend(["M-H".to_string(), "error %".to_string()]);
    }
    let mut rows: Vec<Vec<String>> = (0..measured.len())
        .map(|j| {
            let mut r = vec![
                (j + 1).to_string(),
                sig6(measured[j]),
                sig6(summary.initial_frequencies_hz[j]),
                sig6(percent_error(summary.initial_frequencies_hz[j], measured[j])),
                sig6(summary.updated_frequencies_hz[j]),
                sig6(percent_error(summary.updated_frequencies_hz[j], measured[j])),
                interval(&summary.updated_support_hz[j]),
                interval(&summary.measured_support_hz[j]),
            ];
            if let Some(b) = bayes {
                r.push(sig6(b.mean_frequencies_hz[j]));
                r.push(sig6(percent_error(b.mean_frequencies_hz[j], b.measured_frequencies_hz[j])));
            }
            r
        })
        .collect();
    let mut total = vec![
        "total average error".to_string(),
        String::new(),
        String::new(),
        sig6(total_average_error(&summary.initial_frequencies_hz, measured)),
        String::new(),
        sig6(total_average_error(&summary.updated_frequencies_hz, measured)),
        String::new(),
        String::new(),
    ];
    if let Some(b) = bayes {
        total.push(String::new());
        total.push(sig6(total_average_error(&b.mean_frequencies_hz, &b.measured_frequencies_hz)));
    }
    rows.push(total);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    table(&mut out, &header, &rows);
    out
}

pub fn render_bayes(b: &BayesSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Metropolis-Hastings: {} retained samples, acceptance rate {}",
        b.samples - b.burn_in,
        sig6(b.acceptance_rate)
    );
    let rows: Vec<Vec<String>> = (0..b.mean.len())
        .map(|i| {
            vec![
                b.parameter_labels[i].clone(),
                sig6(b.mean[i]),
                sig6(b.sd[i]),
                sig6(100.0 * b.sd[i] / b.mean[i]),
            ]
        })
        .collect();
    table(&mut out, &["parameter", "mean", "sd", "c.o.v. %"], &rows);
    let _ = writeln!(
        out,
        "total average frequency error of the posterior mean: {} %",
        sig6(total_average_error(&b.mean_frequencies_hz, &b.measured_frequencies_hz))
    );
    out
}
