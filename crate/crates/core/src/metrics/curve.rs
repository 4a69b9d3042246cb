use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConfusionCounts, EvalConfig};
use crate::error::MetricsError;
use crate::filters::{build_pair_set, filtered_counts, FilterSpec};
use crate::frame::Frame;
use crate::geometry::iou_matrix;
use crate::matching::{MatchedPair, Matching};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub fp_per_frame: f64,
}

impl CurvePoint {
    pub fn from_counts(threshold: f64, c: ConfusionCounts, num_frames: usize) -> Self {
        Self {
            threshold,
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision: c.precision(),
            recall: c.recall(),
            fp_per_frame: if num_frames == 0 {
                0.0
            } else {
                c.fp as f64 / num_frames as f64
            },
        }
    }

    pub fn counts(&self) -> ConfusionCounts {
        ConfusionCounts::new(self.tp, self.fp, self.fn_)
    }
}

/// A frame with its full detection-by-label IoU table computed once.
#[derive(Debug, Clone)]
pub struct PreparedFrame<'a> {
    pub frame: &'a Frame,
    iou: Vec<Vec<f64>>,
}

impl<'a> PreparedFrame<'a> {
    pub fn new(frame: &'a Frame) -> Self {
        Self {
            frame,
            iou: iou_matrix(&frame.detection_boxes(), &frame.label_boxes()),
        }
    }

    fn active(&self, cut: f64) -> Vec<usize> {
        (0..self.frame.detections.len())
            .filter(|&i| self.frame.detections[i].score >= cut)
            .collect()
    }

    fn match_subset(&self, active: &[usize], config: &EvalConfig) -> Result<Matching, MetricsError> {
        let rows: Vec<Vec<f64>> = active.iter().map(|&i| self.iou[i].clone()).collect();
        let scores: Vec<f64> = active.iter().map(|&i| self.frame.detections[i].score).collect();
        let local = config
            .matcher
            .run(&rows, &scores, self.frame.labels.len(), config.tau)?;
        // Back to indices into the frame's detection list.
        Ok(Matching {
            pairs: local
                .pairs
                .iter()
                .map(|p| MatchedPair {
                    detection: active[p.detection],
                    ..*p
                })
                .collect(),
            unmatched_detections: local.unmatched_detections.iter().map(|&i| active[i]).collect(),
            unmatched_labels: local.unmatched_labels,
        })
    }
}

/// Matches the detections with score at or above both `threshold` and the
/// configured minimum confidence. Indices refer to the frame's lists.
pub fn match_at_threshold(
    frame: &PreparedFrame<'_>,
    threshold: f64,
    config: &EvalConfig,
) -> Result<Matching, MetricsError> {
    let active = frame.active(threshold.max(config.min_confidence));
    frame.match_subset(&active, config)
}

pub(crate) fn check_scores(frames: &[Frame]) -> Result<(), MetricsError> {
    for (f, frame) in frames.iter().enumerate() {
        for (d, det) in frame.detections.iter().enumerate() {
            if !(0.0..=1.0).contains(&det.score) {
                return Err(MetricsError::ConfidenceOutOfRange {
                    frame: f,
                    detection: d,
                    value: det.score,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn grid_for(frames: &[Frame], config: &EvalConfig) -> Vec<f64> {
    let scores: Vec<f64> = frames
        .iter()
        .flat_map(|f| f.detections.iter().map(|d| d.score))
        .filter(|&s| s >= config.min_confidence)
        .collect();
    config.threshold_grid.thresholds(&scores)
}

/// One curve per filter. Matching is recomputed from scratch at every
/// threshold; filters are then applied to that threshold's pair sets.
///
/// Frames are processed in parallel on the current rayon pool; counts are
/// summed in frame order, so the result does not depend on the pool size.
pub fn curves_for_filters(
    frames: &[Frame],
    config: &EvalConfig,
    filters: &[FilterSpec],
) -> Result<Vec<Vec<CurvePoint>>, MetricsError> {
    config.validate()?;
    check_scores(frames)?;
    let thresholds = grid_for(frames, config);

    let per_frame: Vec<Vec<Vec<ConfusionCounts>>> = frames
        .par_iter()
        .map(|frame| frame_counts(frame, &thresholds, config, filters))
        .collect::<Result<_, _>>()?;

    let mut totals = vec![vec![ConfusionCounts::default(); thresholds.len()]; filters.len()];
    for frame in &per_frame {
        for (t, by_filter) in frame.iter().enumerate() {
            for (k, c) in by_filter.iter().enumerate() {
                totals[k][t] += *c;
            }
        }
    }
    Ok(totals
        .into_iter()
        .map(|counts| {
            thresholds
                .iter()
                .zip(counts)
                .map(|(&t, c)| CurvePoint::from_counts(t, c, frames.len()))
                .collect()
        })
        .collect())
}

fn frame_counts(
    frame: &Frame,
    thresholds: &[f64],
    config: &EvalConfig,
    filters: &[FilterSpec],
) -> Result<Vec<Vec<ConfusionCounts>>, MetricsError> {
    let prepared = PreparedFrame::new(frame);
    let mut out = Vec::with_capacity(thresholds.len());
    let mut last: Option<(Vec<usize>, Vec<ConfusionCounts>)> = None;
    for &t in thresholds {
        let active = prepared.active(t.max(config.min_confidence));
        if let Some((prev, counts)) = &last {
            if *prev == active {
                out.push(counts.clone());
                continue;
            }
        }
        let matching = prepared.match_subset(&active, config)?;
        let pairs = build_pair_set(&matching, &frame.detections, &frame.labels, config.tau)?;
        let counts = filters
            .iter()
            .map(|f| filtered_counts(&pairs, f))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(counts.clone());
        last = Some((active, counts));
    }
    Ok(out)
}

/// Unfiltered precision-recall curve, ordered by descending threshold.
pub fn pr_curve(frames: &[Frame], config: &EvalConfig) -> Result<Vec<CurvePoint>, MetricsError> {
    let mut curves = curves_for_filters(frames, config, &[FilterSpec::always()])?;
    Ok(curves.pop().unwrap_or_default())
}
