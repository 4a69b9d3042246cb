//! Filtered metrics.
//!
//! A filter is applied to the pairs of the one unfiltered association at a
//! fixed IoU threshold; matching is never re-run. A matched pair counts as a
//! true positive only when both members pass, and is dropped from every
//! count when exactly one of them fails. Unmatched records are judged on
//! their own side only. Restricting the data therefore never increases any
//! of tp, fp or fn.
//!
//! [`naive_filtered_counts`] is the strike-then-rematch baseline, kept for
//! comparison; it can report more errors on a subset than on the whole.

mod difficulty;
mod spec;

pub use difficulty::{difficulty_filter, difficulty_filter_with, Difficulty, DifficultyThresholds};
pub use spec::{parse_filter, Atom, Comparator, FilterSpec, Side, UnknownPolicy};

use crate::error::{FilterError, MetricsError};
use crate::frame::{Detection, Label};
use crate::geometry::iou_matrix;
use crate::matching::{Matcher, Matching};
use crate::metrics::{counts_from_matching, ConfusionCounts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullPair<'a> {
    pub detection: &'a Detection,
    pub label: &'a Label,
    pub iou: f64,
}

/// One association recast as pairs and singles, borrowed from the records
/// it was computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet<'a> {
    tau: f64,
    full_pairs: Vec<FullPair<'a>>,
    label_singles: Vec<&'a Label>,
    detection_singles: Vec<&'a Detection>,
}

impl<'a> PairSet<'a> {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn full_pairs(&self) -> &[FullPair<'a>] {
        &self.full_pairs
    }

    pub fn label_singles(&self) -> &[&'a Label] {
        &self.label_singles
    }

    pub fn detection_singles(&self) -> &[&'a Detection] {
        &self.detection_singles
    }
}

pub fn build_pair_set<'a>(
    matching: &Matching,
    detections: &'a [Detection],
    labels: &'a [Label],
    tau: f64,
) -> Result<PairSet<'a>, FilterError> {
    let det = |i: usize| {
        detections.get(i).ok_or(FilterError::IndexOutOfRange {
            kind: "detection",
            index: i,
            len: detections.len(),
        })
    };
    let lab = |i: usize| {
        labels.get(i).ok_or(FilterError::IndexOutOfRange {
            kind: "label",
            index: i,
            len: labels.len(),
        })
    };
    let full_pairs = matching
        .pairs
        .iter()
        .map(|p| {
            Ok(FullPair {
                detection: det(p.detection)?,
                label: lab(p.label)?,
                iou: p.iou,
            })
        })
        .collect::<Result<_, FilterError>>()?;
    let label_singles = matching
        .unmatched_labels
        .iter()
        .map(|&i| lab(i))
        .collect::<Result<_, _>>()?;
    let detection_singles = matching
        .unmatched_detections
        .iter()
        .map(|&i| det(i))
        .collect::<Result<_, _>>()?;
    Ok(PairSet {
        tau,
        full_pairs,
        label_singles,
        detection_singles,
    })
}

/// Where a record of the pair set lands under a filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<'a> {
    TruePositive(FullPair<'a>),
    FalsePositive(&'a Detection),
    FalseNegative(&'a Label),
}

/// Single pass over the pair set yielding every surviving outcome.
pub fn filtered_outcomes<'a>(
    pairs: &PairSet<'a>,
    filter: &FilterSpec,
) -> Result<Vec<Outcome<'a>>, FilterError> {
    let mut out = Vec::with_capacity(
        pairs.full_pairs.len() + pairs.label_singles.len() + pairs.detection_singles.len(),
    );
    for p in &pairs.full_pairs {
        let keep_det = filter.passes_detection(p.detection)?;
        let keep_lab = filter.passes_label(p.label)?;
        if keep_det && keep_lab {
            out.push(Outcome::TruePositive(*p));
        }
    }
    for &d in &pairs.detection_singles {
        if filter.passes_detection(d)? {
            out.push(Outcome::FalsePositive(d));
        }
    }
    for &l in &pairs.label_singles {
        if filter.passes_label(l)? {
            out.push(Outcome::FalseNegative(l));
        }
    }
    Ok(out)
}

pub fn filtered_counts(pairs: &PairSet<'_>, filter: &FilterSpec) -> Result<ConfusionCounts, FilterError> {
    let mut counts = ConfusionCounts::default();
    for o in filtered_outcomes(pairs, filter)? {
        match o {
            Outcome::TruePositive(_) => counts.tp += 1,
            Outcome::FalsePositive(_) => counts.fp += 1,
            Outcome::FalseNegative(_) => counts.fn_ += 1,
        }
    }
    Ok(counts)
}

/// Removes failing records first, then matches the survivors.
pub fn naive_filtered_counts(
    detections: &[Detection],
    labels: &[Label],
    filter: &FilterSpec,
    tau: f64,
    matcher: Matcher,
) -> Result<ConfusionCounts, MetricsError> {
    let mut kept_dets = Vec::new();
    for d in detections {
        if filter.passes_detection(d)? {
            kept_dets.push(d);
        }
    }
    let mut kept_labels = Vec::new();
    for l in labels {
        if filter.passes_label(l)? {
            kept_labels.push(l.bbox);
        }
    }
    let boxes: Vec<_> = kept_dets.iter().map(|d| d.bbox).collect();
    let scores: Vec<f64> = kept_dets.iter().map(|d| d.score).collect();
    let iou = iou_matrix(&boxes, &kept_labels);
    let matching = matcher.run(&iou, &scores, kept_labels.len(), tau)?;
    Ok(counts_from_matching(&matching))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Box2D;
    use crate::matching::optimal_match_boxes;

    fn b(l: f64, t: f64, r: f64, bo: f64) -> Box2D {
        Box2D::new(l, t, r, bo).unwrap()
    }

    /// One detection overlapping two labels; the narrower label is its best
    /// match and is the one the width filter removes.
    fn badgame() -> (Vec<Detection>, Vec<Label>) {
        let det = vec![Detection::new(b(0.0, 0.0, 0.6, 1.0), 0.9)];
        let labels = vec![Label::new(b(0.0, 0.0, 0.6, 1.0)), Label::new(b(0.0, 0.0, 0.7, 1.0))];
        (det, labels)
    }

    fn width_filter() -> FilterSpec {
        parse_filter("label.width >= 0.65").unwrap()
    }

    #[test]
    fn badgame_pair_set_and_counts() {
        let (dets, labels) = badgame();
        let m = optimal_match_boxes(&[dets[0].bbox], &[labels[0].bbox, labels[1].bbox], 0.5)
            .unwrap();
        let ps = build_pair_set(&m, &dets, &labels, 0.5).unwrap();
        assert_eq!(ps.full_pairs().len(), 1);
        assert!(std::ptr::eq(ps.full_pairs()[0].label, &labels[0]));
        assert_eq!(ps.label_singles().len(), 1);
        assert!(std::ptr::eq(ps.label_singles()[0], &labels[1]));
        assert!(ps.detection_singles().is_empty());

        assert_eq!(filtered_counts(&ps, &width_filter()).unwrap(), ConfusionCounts::new(0, 0, 1));
        assert_eq!(
            naive_filtered_counts(&dets, &labels, &width_filter(), 0.5, Matcher::Optimal).unwrap(),
            ConfusionCounts::new(1, 0, 0)
        );
        assert_eq!(filtered_counts(&ps, &FilterSpec::always()).unwrap(), counts_from_matching(&m));
    }

    #[test]
    fn empty_matching_over_one_label() {
        let labels = vec![Label::new(b(0.0, 0.0, 1.0, 1.0))];
        let m = Matching::unmatched(0, 1);
        let ps = build_pair_set(&m, &[], &labels, 0.5).unwrap();
        assert_eq!(ps.label_singles().len(), 1);
        assert_eq!(filtered_counts(&ps, &FilterSpec::always()).unwrap(), ConfusionCounts::new(0, 0, 1));
    }

    #[test]
    fn mismatched_indices_are_rejected() {
        let m = Matching::unmatched(2, 0);
        let dets = vec![Detection::new(b(0.0, 0.0, 1.0, 1.0), 0.5)];
        assert_eq!(
            build_pair_set(&m, &dets, &[], 0.5),
            Err(FilterError::IndexOutOfRange { kind: "detection", index: 1, len: 1 })
        );
    }

    #[test]
    fn naive_filter_can_add_a_false_positive() {
        // Label area 99 just under the bound, its detection 110 above it.
        let dets = vec![Detection::new(b(0.0, 0.0, 11.0, 10.0), 0.9)];
        let labels = vec![Label::new(b(0.0, 0.0, 9.9, 10.0))];
        let filter = parse_filter("both.area >= 100").unwrap();
        let m = optimal_match_boxes(&[dets[0].bbox], &[labels[0].bbox], 0.5).unwrap();
        let unfiltered = counts_from_matching(&m);
        assert_eq!(unfiltered, ConfusionCounts::new(1, 0, 0));
        let naive = naive_filtered_counts(&dets, &labels, &filter, 0.5, Matcher::Optimal).unwrap();
        assert!(naive.fp > unfiltered.fp);
        let ps = build_pair_set(&m, &dets, &labels, 0.5).unwrap();
        assert_eq!(filtered_counts(&ps, &filter).unwrap(), ConfusionCounts::new(0, 0, 0));
    }

    #[test]
    fn missing_attribute_surfaces() {
        let (dets, labels) = badgame();
        let m = optimal_match_boxes(&[dets[0].bbox], &[labels[0].bbox, labels[1].bbox], 0.5)
            .unwrap();
        let ps = build_pair_set(&m, &dets, &labels, 0.5).unwrap();
        let f = parse_filter("label.distance < 30").unwrap();
        assert!(matches!(
            filtered_counts(&ps, &f),
            Err(FilterError::MissingAttribute { .. })
        ));
    }
}
