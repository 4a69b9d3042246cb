use std::fs;

use anyhow::{Context, Result};
use deteval::filters::{build_pair_set, filtered_counts, naive_filtered_counts, Atom, Comparator, FilterSpec, Side};
use deteval::ingest::{round_significant, ReportFormat};
use deteval::metrics::{match_at_threshold, ConfusionCounts, EvalConfig, PreparedFrame};
use deteval::Frame;
use rayon::prelude::*;
use serde::Serialize;

use super::{emit_json, load, thread_pool};
use crate::args::SweepArgs;
use crate::settings::{usage, Settings};

pub const SWEEP_ATTRIBUTES: &[&str] = &["area", "width", "height_px"];

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub class: String,
    pub value: f64,
    pub filter: String,
    pub stable: ConfusionCounts,
    pub stable_precision: f64,
    pub stable_recall: f64,
    pub naive: ConfusionCounts,
    pub naive_precision: f64,
    pub naive_recall: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub attribute: String,
    pub side: Side,
    pub rows: Vec<SweepRow>,
    /// Share of rows where stable precision is at least the naive one.
    pub stable_precision_ge_naive: f64,
}

/// Thresholds `from, ..., to` in `steps` equal increments.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Stable and naive counts for each filter, summed over frames in order.
pub fn sweep_counts(
    frames: &[Frame],
    config: &EvalConfig,
    filters: &[FilterSpec],
) -> Result<Vec<(ConfusionCounts, ConfusionCounts)>> {
    let per_frame: Vec<Vec<(ConfusionCounts, ConfusionCounts)>> = frames
        .par_iter()
        .map(|frame| -> Result<_> {
            let prepared = PreparedFrame::new(frame);
            let matching = match_at_threshold(&prepared, config.min_confidence, config)?;
            let pairs = build_pair_set(&matching, &frame.detections, &frame.labels, config.tau)?;
            let active: Vec<_> = frame
                .detections
                .iter()
                .filter(|d| d.score >= config.min_confidence)
                .cloned()
                .collect();
            filters
                .iter()
                .map(|f| {
                    let stable = filtered_counts(&pairs, f)?;
                    let naive = naive_filtered_counts(&active, &frame.labels, f, config.tau, config.matcher)?;
                    Ok((stable, naive))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut totals = vec![(ConfusionCounts::default(), ConfusionCounts::default()); filters.len()];
    for frame in per_frame {
        for (t, (s, n)) in totals.iter_mut().zip(frame) {
            t.0 += s;
            t.1 += n;
        }
    }
    Ok(totals)
}

pub fn run_sweep(args: &SweepArgs, _argv: &[String]) -> Result<()> {
    let settings = Settings::resolve(&args.eval)?;
    if !SWEEP_ATTRIBUTES.contains(&args.attribute.as_str()) {
        return Err(usage(format!(
            "--attribute must be one of {}, got `{}`",
            SWEEP_ATTRIBUTES.join(", "),
            args.attribute
        )));
    }
    let side: Side = args.side.parse().map_err(usage)?;
    if args.steps == 0 || !args.from.is_finite() || !args.to.is_finite() {
        return Err(usage("--steps must be positive and --from/--to finite"));
    }
    let values = sweep_values(args.from, args.to, args.steps);
    let filters: Vec<FilterSpec> = values
        .iter()
        .map(|&v| FilterSpec::new(vec![Atom::new(side, &args.attribute, Comparator::Ge, v)]))
        .collect();

    let pool = thread_pool(settings.threads)?;
    let rows = pool.install(|| -> Result<Vec<SweepRow>> {
        let loaded = load(&settings)?;
        let mut rows = Vec::new();
        for (class, frames) in &loaded.classes {
            let totals = sweep_counts(frames, &settings.config, &filters)?;
            for ((&value, spec), (stable, naive)) in values.iter().zip(&filters).zip(totals) {
                rows.push(SweepRow {
                    class: class.clone(),
                    value,
                    filter: spec.to_string(),
                    stable,
                    stable_precision: stable.precision(),
                    stable_recall: stable.recall(),
                    naive,
                    naive_precision: naive.precision(),
                    naive_recall: naive.recall(),
                });
            }
        }
        Ok(rows)
    })?;

    let ge = rows
        .iter()
        .filter(|r| r.stable_precision >= r.naive_precision - 1e-12)
        .count();
    let report = SweepReport {
        attribute: args.attribute.clone(),
        side,
        stable_precision_ge_naive: if rows.is_empty() { 1.0 } else { ge as f64 / rows.len() as f64 },
        rows,
    };
    eprintln!(
        "stable precision >= naive precision at {} of {} sweep points ({:.1}%)",
        ge,
        report.rows.len(),
        100.0 * report.stable_precision_ge_naive
    );

    match settings.format {
        ReportFormat::Json => emit_json(&report, settings.out.as_deref()),
        ReportFormat::Csv => {
            let dir = settings.out.as_deref().expect("csv output needs a directory");
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join("sweep.csv");
            let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
            w.write_record([
                "class", "value", "stable_tp", "stable_fp", "stable_fn", "stable_precision", "stable_recall",
                "naive_tp", "naive_fp", "naive_fn", "naive_precision", "naive_recall",
            ])?;
            let num = |x: f64| round_significant(x).to_string();
            for r in &report.rows {
                w.write_record([
                    r.class.clone(),
                    num(r.value),
                    r.stable.tp.to_string(),
                    r.stable.fp.to_string(),
                    r.stable.fn_.to_string(),
                    num(r.stable_precision),
                    num(r.stable_recall),
                    r.naive.tp.to_string(),
                    r.naive.fp.to_string(),
                    r.naive.fn_.to_string(),
                    num(r.naive_precision),
                    num(r.naive_recall),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
