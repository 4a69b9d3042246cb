use serde::{Deserialize, Serialize};

use super::CurvePoint;
use crate::error::MetricsError;

/// Interpolation convention for average precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApMode {
    /// Area under the right envelope of the curve (VOC 2010+).
    AllPoints,
    /// Mean envelope precision at recall 0, 0.1, ..., 1.
    ElevenPoint,
    /// Mean envelope precision at recall 0, 1/40, ..., 1.
    FortyOnePoint,
}

impl ApMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ApMode::AllPoints => "all-points",
            ApMode::ElevenPoint => "eleven-point",
            ApMode::FortyOnePoint => "forty-one-point",
        }
    }
}

impl std::str::FromStr for ApMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-points" => Ok(ApMode::AllPoints),
            "eleven-point" | "11" => Ok(ApMode::ElevenPoint),
            "forty-one-point" | "41" => Ok(ApMode::FortyOnePoint),
            other => Err(format!(
                "unknown AP mode `{other}` (expected all-points, eleven-point or forty-one-point)"
            )),
        }
    }
}

/// Drops operating points whose recall falls below that of an earlier
/// (higher-threshold) point. Returns the kept points and how many were
/// dropped.
pub fn monotone_envelope(curve: &[CurvePoint]) -> (Vec<CurvePoint>, usize) {
    let mut kept = Vec::with_capacity(curve.len());
    let mut best = f64::NEG_INFINITY;
    for p in curve {
        if p.recall >= best {
            best = p.recall;
            kept.push(p.clone());
        }
    }
    let dropped = curve.len() - kept.len();
    (kept, dropped)
}

/// Points with no detections carry a vacuous precision of 1 and are not
/// operating points; they are ignored.
pub fn average_precision(curve: &[CurvePoint], mode: ApMode) -> Result<f64, MetricsError> {
    if curve.is_empty() {
        return Err(MetricsError::EmptyCurve);
    }
    if let Some(i) = curve.windows(2).position(|w| w[1].recall < w[0].recall) {
        return Err(MetricsError::UnsortedCurve { index: i + 1 });
    }
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.tp + p.fp > 0)
        .map(|p| (p.recall, p.precision))
        .collect();

    Ok(match mode {
        ApMode::AllPoints => all_points(&pts),
        ApMode::ElevenPoint => sampled(&pts, 11),
        ApMode::FortyOnePoint => sampled(&pts, 41),
    })
}

fn all_points(pts: &[(f64, f64)]) -> f64 {
    let mut recall = Vec::with_capacity(pts.len() + 2);
    let mut precision = Vec::with_capacity(pts.len() + 2);
    recall.push(0.0);
    precision.push(0.0);
    for &(r, p) in pts {
        recall.push(r);
        precision.push(p);
    }
    recall.push(1.0);
    precision.push(0.0);
    for i in (0..precision.len() - 1).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    (1..recall.len())
        .filter(|&i| recall[i] != recall[i - 1])
        .map(|i| (recall[i] - recall[i - 1]) * precision[i])
        .sum()
}

fn sampled(pts: &[(f64, f64)], samples: usize) -> f64 {
    let last = (samples - 1) as f64;
    let total: f64 = (0..samples)
        .map(|k| {
            let r = k as f64 / last;
            pts.iter()
                .filter(|&&(pr, _)| pr >= r)
                .map(|&(_, pp)| pp)
                .fold(0.0, f64::max)
        })
        .sum();
    total / samples as f64
}
