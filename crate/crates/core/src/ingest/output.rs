use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::IngestError;
use crate::report::EvalReport;

pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every float in `v` to nine significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_significant).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// JSON value of the report with every float rounded to nine significant
/// digits.
pub fn report_value(report: &EvalReport) -> Result<Value, IngestError> {
    let mut v = serde_json::to_value(report).map_err(|e| IngestError::Serialize(e.to_string()))?;
    round_floats(&mut v);
    Ok(v)
}

/// JSON: one document at `path`. CSV: `path` is a directory receiving
/// `summary.csv` plus one curve and one calibration file per class/filter.
pub fn write_report(report: &EvalReport, path: &Path, format: ReportFormat) -> Result<(), IngestError> {
    match format {
        ReportFormat::Json => {
            let text = serde_json::to_string_pretty(&report_value(report)?)
                .map_err(|e| IngestError::Serialize(e.to_string()))?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(io_err(parent))?;
            }
            fs::write(path, text + "\n").map_err(io_err(path))
        }
        ReportFormat::Csv => write_csv(report, path),
    }
}

pub fn read_report(path: &Path) -> Result<EvalReport, IngestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| IngestError::Serialize(e.to_string()))
}

fn num(x: f64) -> String {
    round_significant(x).to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn write_csv(report: &EvalReport, dir: &Path) -> Result<(), IngestError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |e: csv::Error| IngestError::Io {
            path: path.clone(),
            source: std::io::Error::other(e.to_string()),
        }
    };

    let summary_path = dir.join("summary.csv");
    let mut summary = csv::Writer::from_path(&summary_path).map_err(csv_err(&summary_path))?;
    summary
        .write_record([
            "class", "filter", "tp", "fp", "fn", "precision", "recall", "ap", "brier_labels",
            "brier_detections", "brier_union",
        ])
        .map_err(csv_err(&summary_path))?;

    for (class, cr) in &report.classes {
        for (name, fr) in &cr.filters {
            let c = fr.counts;
            summary
                .write_record([
                    class.clone(),
                    name.clone(),
                    c.tp.to_string(),
                    c.fp.to_string(),
                    c.fn_.to_string(),
                    num(fr.precision),
                    num(fr.recall),
                    opt(fr.ap),
                    opt(fr.brier.labels),
                    opt(fr.brier.detections),
                    opt(fr.brier.union),
                ])
                .map_err(csv_err(&summary_path))?;

            let stem = format!("{}__{}", file_safe(class), file_safe(name));
            let curve_path = dir.join(format!("{stem}__curve.csv"));
            let mut w = csv::Writer::from_path(&curve_path).map_err(csv_err(&curve_path))?;
            w.write_record(["threshold", "tp", "fp", "fn", "precision", "recall", "fp_per_frame"])
                .map_err(csv_err(&curve_path))?;
            for p in &fr.curve {
                w.write_record([
                    num(p.threshold),
                    p.tp.to_string(),
                    p.fp.to_string(),
                    p.fn_.to_string(),
                    num(p.precision),
                    num(p.recall),
                    num(p.fp_per_frame),
                ])
                .map_err(csv_err(&curve_path))?;
            }
            w.flush().map_err(io_err(&curve_path))?;

            let cal_path = dir.join(format!("{stem}__calibration.csv"));
            let mut w = csv::Writer::from_path(&cal_path).map_err(csv_err(&cal_path))?;
            w.write_record(["bin_center", "mean_confidence", "empirical_precision", "sample_count"])
                .map_err(csv_err(&cal_path))?;
            for b in &fr.calibration {
                w.write_record([
                    num(b.bin_center),
                    opt(b.mean_confidence),
                    opt(b.empirical_precision),
                    b.sample_count.to_string(),
                ])
                .map_err(csv_err(&cal_path))?;
            }
            w.flush().map_err(io_err(&cal_path))?;
        }
    }
    summary.flush().map_err(io_err(&summary_path))
}
