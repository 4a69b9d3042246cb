//! Evaluation report assembly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::filters::FilterSpec;
use crate::frame::Frame;
use crate::metrics::{
    average_precision, bin_samples, calibration_distance, curves_for_filters, monotone_envelope,
    operating_point, BrierSupport, BrierTally, CalibrationBin, ConfusionCounts, CurvePoint, EvalConfig,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub role: String,
    pub path: String,
    pub file_count: usize,
    pub total_bytes: u64,
    pub sha256: String,
}

/// How a report was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub datasets: Vec<DatasetFingerprint>,
    pub tool_version: String,
    pub threads: usize,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BrierReport {
    pub labels: Option<f64>,
    pub detections: Option<f64>,
    pub union: Option<f64>,
}

impl BrierReport {
    pub fn from_tally(t: &BrierTally) -> Self {
        Self {
            labels: t.score(BrierSupport::Labels).ok(),
            detections: t.score(BrierSupport::Detections).ok(),
            union: t.score(BrierSupport::Union).ok(),
        }
    }

    pub fn get(&self, support: BrierSupport) -> Option<f64> {
        match support {
            BrierSupport::Labels => self.labels,
            BrierSupport::Detections => self.detections,
            BrierSupport::Union => self.union,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub expression: String,
    /// At the operating point (`min_confidence`).
    pub counts: ConfusionCounts,
    pub precision: f64,
    pub recall: f64,
    /// Absent when the filter leaves no labels.
    pub ap: Option<f64>,
    pub brier: BrierReport,
    pub calibration_l2: Option<f64>,
    /// Curve points dropped before AP integration because their recall
    /// fell below an earlier point's.
    pub recall_violations: usize,
    pub curve: Vec<CurvePoint>,
    pub calibration: Vec<CalibrationBin>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassReport {
    pub frames: usize,
    pub filters: BTreeMap<String, FilterReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub classes: BTreeMap<String, ClassReport>,
    pub manifest: Option<RunManifest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedFilter {
    pub name: String,
    pub spec: FilterSpec,
}

impl NamedFilter {
    pub fn new(name: impl Into<String>, spec: FilterSpec) -> Self {
        Self {
            name: name.into(),
            spec,
        }
    }

    pub fn all() -> Self {
        Self::new("all", FilterSpec::always())
    }
}

pub fn evaluate_class(
    frames: &[Frame],
    config: &EvalConfig,
    filters: &[NamedFilter],
) -> Result<ClassReport, MetricsError> {
    let specs: Vec<FilterSpec> = filters.iter().map(|f| f.spec.clone()).collect();
    let curves = curves_for_filters(frames, config, &specs)?;
    let mut out = BTreeMap::new();
    for (named, curve) in filters.iter().zip(curves) {
        let (tally, samples) = operating_point(frames, config, &named.spec)?;
        let tp = samples.iter().filter(|s| s.1).count();
        let counts = ConfusionCounts::new(tp, samples.len() - tp, tally.label_count - tp);

        let (envelope, recall_violations) = monotone_envelope(&curve);
        let has_labels = counts.tp + counts.fn_ > 0;
        let ap = if has_labels {
            Some(average_precision(&envelope, config.ap_mode)?)
        } else {
            None
        };
        let calibration = bin_samples(&samples, config.calibration_bins);
        out.insert(
            named.name.clone(),
            FilterReport {
                expression: named.spec.to_string(),
                counts,
                precision: counts.precision(),
                recall: counts.recall(),
                ap,
                brier: BrierReport::from_tally(&tally),
                calibration_l2: calibration_distance(&calibration),
                recall_violations,
                curve,
                calibration,
            },
        );
    }
    Ok(ClassReport {
        frames: frames.len(),
        filters: out,
    })
}

pub fn evaluate(
    classes: &BTreeMap<String, Vec<Frame>>,
    config: &EvalConfig,
    filters: &[NamedFilter],
) -> Result<EvalReport, MetricsError> {
    config.validate()?;
    let mut out = BTreeMap::new();
    for (name, frames) in classes {
        out.insert(name.clone(), evaluate_class(frames, config, filters)?);
    }
    Ok(EvalReport {
        config: config.clone(),
        classes: out,
        manifest: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::parse_filter;
    use crate::frame::{Detection, Label};
    use crate::geometry::Box2D;

    #[test]
    fn endpoint_matches_operating_point() {
        let frames: Vec<Frame> = (0..30)
            .map(|s| crate::matching::generate_scenario(s, &Default::default()).into_frame(s.to_string()))
            .collect();
        let config = EvalConfig { tau: 0.5, min_confidence: 0.25, ..Default::default() };
        let filters = vec![
            NamedFilter::all(),
            NamedFilter::new("big", parse_filter("both.area >= 2000").unwrap()),
        ];
        let r = evaluate_class(&frames, &config, &filters).unwrap();
        for f in r.filters.values() {
            assert_eq!(f.curve.last().unwrap().counts(), f.counts);
            assert!(f.curve.iter().all(|p| p.threshold >= 0.25));
        }
        let all = &r.filters["all"];
        let big = &r.filters["big"];
        assert!(big.counts.dominated_by(&all.counts));
    }

    #[test]
    fn no_labels_means_no_ap() {
        let b = Box2D::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let frames = vec![Frame::new("0", vec![Detection::new(b, 0.5)], Vec::<Label>::new())];
        let r = evaluate_class(&frames, &EvalConfig::default(), &[NamedFilter::all()]).unwrap();
        let f = &r.filters["all"];
        assert_eq!(f.ap, None);
        assert_eq!(f.brier.labels, None);
        assert_eq!(f.brier.detections, Some(0.25));
    }
}
