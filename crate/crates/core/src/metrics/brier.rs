use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{check_scores, match_at_threshold, PreparedFrame};
use super::EvalConfig;
use crate::error::MetricsError;
use crate::filters::{build_pair_set, filtered_outcomes, FilterSpec, Outcome};
use crate::frame::Frame;

/// The set of samples a Brier score averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BrierSupport {
    /// Every label: matched ones score `(1 - c)^2`, missed ones 1.
    Labels,
    /// Every detection: true positives `(1 - c)^2`, false positives `c^2`.
    Detections,
    /// Labels and detections, each true positive counted once.
    Union,
}

impl BrierSupport {
    pub fn as_str(&self) -> &'static str {
        match self {
            BrierSupport::Labels => "labels",
            BrierSupport::Detections => "detections",
            BrierSupport::Union => "union",
        }
    }
}

impl std::str::FromStr for BrierSupport {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "labels" => Ok(BrierSupport::Labels),
            "detections" => Ok(BrierSupport::Detections),
            "union" => Ok(BrierSupport::Union),
            other => Err(format!(
                "unknown Brier support `{other}` (expected labels, detections or union)"
            )),
        }
    }
}

/// Running squared-error sums for all three supports.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BrierTally {
    pub label_sum: f64,
    pub label_count: usize,
    pub detection_sum: f64,
    pub detection_count: usize,
    pub union_sum: f64,
    pub union_count: usize,
}

impl BrierTally {
    pub fn record(&mut self, outcome: &Outcome<'_>) {
        match outcome {
            Outcome::TruePositive(p) => {
                let e = (1.0 - p.detection.score).powi(2);
                self.label_sum += e;
                self.label_count += 1;
                self.detection_sum += e;
                self.detection_count += 1;
                self.union_sum += e;
                self.union_count += 1;
            }
            Outcome::FalsePositive(d) => {
                let e = d.score * d.score;
                self.detection_sum += e;
                self.detection_count += 1;
                self.union_sum += e;
                self.union_count += 1;
            }
            Outcome::FalseNegative(_) => {
                self.label_sum += 1.0;
                self.label_count += 1;
                self.union_sum += 1.0;
                self.union_count += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &BrierTally) {
        self.label_sum += other.label_sum;
        self.label_count += other.label_count;
        self.detection_sum += other.detection_sum;
        self.detection_count += other.detection_count;
        self.union_sum += other.union_sum;
        self.union_count += other.union_count;
    }

    /// Mean over the support; an empty support has no score.
    pub fn score(&self, support: BrierSupport) -> Result<f64, MetricsError> {
        let (sum, count) = match support {
            BrierSupport::Labels => (self.label_sum, self.label_count),
            BrierSupport::Detections => (self.detection_sum, self.detection_count),
            BrierSupport::Union => (self.union_sum, self.union_count),
        };
        if count == 0 {
            Err(MetricsError::EmptySupport(support.as_str()))
        } else {
            Ok(sum / count as f64)
        }
    }
}

pub(crate) fn frame_outcomes_tally(
    frame: &Frame,
    config: &EvalConfig,
    filter: &FilterSpec,
) -> Result<(BrierTally, Vec<(f64, bool)>), MetricsError> {
    let prepared = PreparedFrame::new(frame);
    let matching = match_at_threshold(&prepared, config.min_confidence, config)?;
    let pairs = build_pair_set(&matching, &frame.detections, &frame.labels, config.tau)?;
    let mut tally = BrierTally::default();
    let mut scored = Vec::new();
    for o in filtered_outcomes(&pairs, filter)? {
        tally.record(&o);
        match o {
            Outcome::TruePositive(p) => scored.push((p.detection.score, true)),
            Outcome::FalsePositive(d) => scored.push((d.score, false)),
            Outcome::FalseNegative(_) => {}
        }
    }
    Ok((tally, scored))
}

/// Tallies for the operating point at `config.min_confidence`, merged in
/// frame order.
pub fn operating_point(
    frames: &[Frame],
    config: &EvalConfig,
    filter: &FilterSpec,
) -> Result<(BrierTally, Vec<(f64, bool)>), MetricsError> {
    config.validate()?;
    check_scores(frames)?;
    let per_frame: Vec<_> = frames
        .par_iter()
        .map(|f| frame_outcomes_tally(f, config, filter))
        .collect::<Result<_, _>>()?;
    let mut tally = BrierTally::default();
    let mut scored = Vec::new();
    for (t, s) in per_frame {
        tally.merge(&t);
        scored.extend(s);
    }
    Ok((tally, scored))
}

pub fn brier_score(
    frames: &[Frame],
    config: &EvalConfig,
    support: BrierSupport,
) -> Result<f64, MetricsError> {
    operating_point(frames, config, &FilterSpec::always())?
        .0
        .score(support)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub bin_center: f64,
    pub mean_confidence: Option<f64>,
    pub empirical_precision: Option<f64>,
    pub sample_count: usize,
}

/// Buckets `(confidence, is_true_positive)` samples into `bins` equal-width
/// bins over `[0, 1]`; a confidence of exactly 1 falls in the last bin.
pub fn bin_samples(samples: &[(f64, bool)], bins: usize) -> Vec<CalibrationBin> {
    let mut sum_conf = vec![0.0; bins];
    let mut hits = vec![0usize; bins];
    let mut counts = vec![0usize; bins];
    for &(c, tp) in samples {
        let i = ((c * bins as f64).floor() as usize).min(bins - 1);
        sum_conf[i] += c;
        hits[i] += tp as usize;
        counts[i] += 1;
    }
    (0..bins)
        .map(|i| {
            let n = counts[i];
            CalibrationBin {
                bin_center: (i as f64 + 0.5) / bins as f64,
                mean_confidence: (n > 0).then(|| sum_conf[i] / n as f64),
                empirical_precision: (n > 0).then(|| hits[i] as f64 / n as f64),
                sample_count: n,
            }
        })
        .collect()
}

/// Reliability curve of detections at the operating point.
pub fn calibration_curve(frames: &[Frame], config: &EvalConfig) -> Result<Vec<CalibrationBin>, MetricsError> {
    let (_, samples) = operating_point(frames, config, &FilterSpec::always())?;
    Ok(bin_samples(&samples, config.calibration_bins))
}

/// Count-weighted root-mean-square gap between mean confidence and
/// empirical precision over occupied bins.
pub fn calibration_distance(bins: &[CalibrationBin]) -> Option<f64> {
    let total: usize = bins.iter().map(|b| b.sample_count).sum();
    if total == 0 {
        return None;
    }
    let sq: f64 = bins
        .iter()
        .filter_map(|b| Some(b.sample_count as f64 * (b.mean_confidence? - b.empirical_precision?).powi(2)))
        .sum();
    Some((sq / total as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{Detection, Label};
    use crate::geometry::Box2D;

    fn b(x: f64) -> Box2D {
        Box2D::new(x, 0.0, x + 10.0, 10.0).unwrap()
    }

    fn cfg() -> EvalConfig {
        EvalConfig { tau: 0.5, ..Default::default() }
    }

    #[test]
    fn perfect_confident_detector_scores_zero() {
        let frames = vec![Frame::new(
            "0",
            vec![Detection::new(b(0.0), 1.0), Detection::new(b(50.0), 1.0)],
            vec![Label::new(b(0.0)), Label::new(b(50.0))],
        )];
        for s in [BrierSupport::Labels, BrierSupport::Detections, BrierSupport::Union] {
            assert_eq!(brier_score(&frames, &cfg(), s).unwrap(), 0.0);
        }
    }

    #[test]
    fn missed_label_scores_one_and_empty_support_is_absent() {
        let frames = vec![Frame::new("0", vec![], vec![Label::new(b(0.0))])];
        assert_eq!(brier_score(&frames, &cfg(), BrierSupport::Labels).unwrap(), 1.0);
        assert_eq!(
            brier_score(&frames, &cfg(), BrierSupport::Detections),
            Err(MetricsError::EmptySupport("detections"))
        );
    }

    #[test]
    fn low_confidence_false_positive_is_rewarded_on_union_only() {
        let a = vec![Frame::new("0", vec![Detection::new(b(0.0), 0.9)], vec![Label::new(b(0.0))])];
        let bm = vec![Frame::new(
            "0",
            vec![Detection::new(b(0.0), 0.9), Detection::new(b(100.0), 0.01)],
            vec![Label::new(b(0.0))],
        )];
        let ua = brier_score(&a, &cfg(), BrierSupport::Union).unwrap();
        let ub = brier_score(&bm, &cfg(), BrierSupport::Union).unwrap();
        assert!((ua - 0.01).abs() < 1e-12);
        assert!((ub - 0.00505).abs() < 1e-12);
        let la = brier_score(&a, &cfg(), BrierSupport::Labels).unwrap();
        let lb = brier_score(&bm, &cfg(), BrierSupport::Labels).unwrap();
        assert_eq!(la, lb);
    }

    #[test]
    fn min_confidence_cuts_detections() {
        let frames = vec![Frame::new(
            "0",
            vec![Detection::new(b(0.0), 0.2), Detection::new(b(100.0), 0.9)],
            vec![Label::new(b(0.0))],
        )];
        let c = EvalConfig { min_confidence: 0.25, ..cfg() };
        // The only surviving detection is a FP; the label is missed.
        assert_eq!(brier_score(&frames, &c, BrierSupport::Labels).unwrap(), 1.0);
        assert!((brier_score(&frames, &c, BrierSupport::Detections).unwrap() - 0.81).abs() < 1e-12);
    }

    #[test]
    fn calibration_bins() {
        let frames = vec![Frame::new(
            "0",
            vec![Detection::new(b(0.0), 1.0), Detection::new(b(50.0), 1.0)],
            vec![Label::new(b(0.0)), Label::new(b(50.0))],
        )];
        let bins = calibration_curve(&frames, &cfg()).unwrap();
        assert_eq!(bins.len(), 10);
        let occupied: Vec<_> = bins.iter().filter(|b| b.sample_count > 0).collect();
        assert_eq!(occupied.len(), 1);
        assert_eq!(occupied[0].empirical_precision, Some(1.0));
        assert_eq!(occupied[0].bin_center, 0.95);
        assert!(bins.iter().filter(|b| b.sample_count == 0).all(|b| b.empirical_precision.is_none()));
        assert_eq!(calibration_distance(&bins), Some(0.0));

        let fps = vec![Frame::new("0", vec![Detection::new(b(0.0), 0.33), Detection::new(b(50.0), 0.71)], vec![])];
        let bins = calibration_curve(&fps, &cfg()).unwrap();
        assert!(bins
            .iter()
            .filter(|b| b.sample_count > 0)
            .all(|b| b.empirical_precision == Some(0.0)));
    }
}
