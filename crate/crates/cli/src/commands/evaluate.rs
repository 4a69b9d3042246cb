use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::Result;
use deteval::ingest::{write_report, ReportFormat};
use deteval::metrics::{CalibrationBin, CurvePoint, EvalConfig};
use deteval::report::{evaluate, EvalReport, RunManifest};
use serde::Serialize;

use super::{emit_json, load, thread_pool};
use crate::args::EvalArgs;
use crate::manifest::manifest;
use crate::settings::Settings;

fn build_report(settings: &Settings, argv: &[String]) -> Result<EvalReport> {
    let start = Instant::now();
    let pool = thread_pool(settings.threads)?;
    let (mut report, fingerprints) = pool.install(|| -> Result<_> {
        let loaded = load(settings)?;
        let report = evaluate(&loaded.classes, &settings.config, &settings.filters)?;
        Ok((report, loaded.fingerprints))
    })?;
    report.manifest = Some(manifest(
        argv,
        fingerprints,
        settings.threads,
        start.elapsed().as_secs_f64(),
    ));
    Ok(report)
}

fn print_summary(report: &EvalReport) {
    for (class, cr) in &report.classes {
        for (name, f) in &cr.filters {
            let ap = f.ap.map_or("n/a".to_string(), |a| format!("{a:.4}"));
            let brier = f
                .brier
                .get(report.config.brier_support)
                .map_or("n/a".to_string(), |b| format!("{b:.4}"));
            eprintln!("{class} [{name}] {} AP={ap} Brier={brier}", f.counts);
        }
    }
}

pub fn run_evaluate(args: &EvalArgs, argv: &[String]) -> Result<()> {
    let settings = Settings::resolve(args)?;
    let report = build_report(&settings, argv)?;
    print_summary(&report);
    match &settings.out {
        Some(path) => write_report(&report, path, settings.format)?,
        None => emit_json(&report, None)?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CurveSet<'a> {
    /// Precision, recall and FP-per-frame at every threshold.
    curve: &'a [CurvePoint],
    calibration: &'a [CalibrationBin],
}

#[derive(Debug, Serialize)]
struct CurvesDocument<'a> {
    config: &'a EvalConfig,
    classes: BTreeMap<&'a str, BTreeMap<&'a str, CurveSet<'a>>>,
    manifest: &'a Option<RunManifest>,
}

pub fn run_curves(args: &EvalArgs, argv: &[String]) -> Result<()> {
    let settings = Settings::resolve(args)?;
    let report = build_report(&settings, argv)?;
    if settings.format == ReportFormat::Csv {
        let dir = settings.out.as_deref().expect("csv output needs a directory");
        write_report(&report, dir, ReportFormat::Csv)?;
        return Ok(());
    }
    let classes = report
        .classes
        .iter()
        .map(|(c, cr)| {
            let filters = cr
                .filters
                .iter()
                .map(|(n, f)| {
                    (
                        n.as_str(),
                        CurveSet {
                            curve: &f.curve,
                            calibration: &f.calibration,
                        },
                    )
                })
                .collect();
            (c.as_str(), filters)
        })
        .collect();
    let doc = CurvesDocument {
        config: &report.config,
        classes,
        manifest: &report.manifest,
    };
    emit_json(&doc, settings.out.as_deref())
}
