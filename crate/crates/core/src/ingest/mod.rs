//! KITTI-format ingestion and report output.

mod dataset;
mod kitti;
mod output;

use std::collections::{BTreeMap, BTreeSet};

pub use dataset::{load_dataset, DatasetIter, FramePair};
pub use kitti::{
    parse_detection_line, parse_kitti_line, parse_label_line, parse_strict_number, DetectionRecord,
    KittiRecord, LabelRecord, LineKind, DETECTION_FIELDS, DONT_CARE, LABEL_FIELDS,
};
pub use output::{read_report, report_value, round_floats, round_significant, write_report, ReportFormat};

use crate::frame::{Attributes, Detection, Frame, Label};
use crate::geometry::{overlap_over_area, Box2D};
use crate::metrics::{EvalConfig, ScoreTransform};

/// Records carrying a class name.
pub trait Classed {
    fn class_name(&self) -> &str;
    fn set_class_name(&mut self, name: String);
}

impl Classed for LabelRecord {
    fn class_name(&self) -> &str {
        &self.class_name
    }

    fn set_class_name(&mut self, name: String) {
        self.class_name = name;
    }
}

impl Classed for DetectionRecord {
    fn class_name(&self) -> &str {
        &self.object.class_name
    }

    fn set_class_name(&mut self, name: String) {
        self.object.class_name = name;
    }
}

/// Renames classes through `collapse` in a single pass; chains such as
/// `Van -> Car -> Vehicle` are not followed.
pub fn apply_class_map<R: Classed>(mut records: Vec<R>, collapse: &BTreeMap<String, String>) -> Vec<R> {
    for r in &mut records {
        if let Some(to) = collapse.get(r.class_name()) {
            r.set_class_name(to.clone());
        }
    }
    records
}

/// Drops detections covered by any DontCare region by at least
/// `overlap_threshold` of their own area.
pub fn suppress_dontcare(
    detections: Vec<Detection>,
    dontcare_regions: &[Box2D],
    overlap_threshold: f64,
) -> Vec<Detection> {
    detections
        .into_iter()
        .filter(|d| {
            !dontcare_regions
                .iter()
                .any(|r| overlap_over_area(&d.bbox, r) >= overlap_threshold)
        })
        .collect()
}

fn object_attributes(r: &LabelRecord) -> Attributes {
    let mut a = Attributes::new();
    a.insert("truncation".into(), r.truncation);
    a.insert("occlusion".into(), r.occlusion.map(f64::from));
    a.insert("alpha".into(), Some(r.alpha));
    a.insert("rotation_y".into(), Some(r.rotation_y));
    a.insert("distance".into(), Some(r.location_xyz[2]));
    a
}

pub fn label_from_record(r: &LabelRecord) -> Label {
    Label {
        bbox: r.bbox,
        attributes: object_attributes(r),
    }
}

pub fn detection_from_record(r: &DetectionRecord) -> Detection {
    Detection {
        bbox: r.object.bbox,
        score: r.score,
        attributes: object_attributes(&r.object),
    }
}

/// Maps every detection score into `[0, 1]`.
///
/// With [`ScoreTransform::None`] the scores must already be probabilities;
/// otherwise an error names the first offending frame. `Minmax` rescales
/// over the whole dataset and maps a constant score to 0.5.
pub fn apply_score_transform(frames: &mut [FramePair], transform: ScoreTransform) -> Result<(), String> {
    let scores = || frames.iter().flat_map(|f| f.detections.iter().map(|d| d.score));
    match transform {
        ScoreTransform::None => {
            for f in frames.iter() {
                if let Some(d) = f.detections.iter().find(|d| !(0.0..=1.0).contains(&d.score)) {
                    return Err(format!(
                        "frame {}: detection score {} is not a probability; \
                         pass --score-transform sigmoid|minmax",
                        f.frame_id, d.score
                    ));
                }
            }
        }
        ScoreTransform::Sigmoid => {
            for d in frames.iter_mut().flat_map(|f| f.detections.iter_mut()) {
                d.score = 1.0 / (1.0 + (-d.score).exp());
            }
        }
        ScoreTransform::Minmax => {
            let lo = scores().fold(f64::INFINITY, f64::min);
            let hi = scores().fold(f64::NEG_INFINITY, f64::max);
            for d in frames.iter_mut().flat_map(|f| f.detections.iter_mut()) {
                d.score = if hi > lo { (d.score - lo) / (hi - lo) } else { 0.5 };
            }
        }
    }
    Ok(())
}

/// Classes present among labels and detections, DontCare excluded.
pub fn classes_in(frames: &[FramePair]) -> Vec<String> {
    let mut set = BTreeSet::new();
    for f in frames {
        set.extend(f.labels.iter().map(|l| l.class_name.clone()));
        set.extend(f.detections.iter().map(|d| d.object.class_name.clone()));
    }
    set.remove(DONT_CARE);
    set.into_iter().collect()
}

/// Engine frames for one class: class collapse, then DontCare suppression
/// (when enabled), then conversion.
pub fn frames_for_class(pairs: &[FramePair], class: &str, config: &EvalConfig) -> Vec<Frame> {
    pairs
        .iter()
        .map(|p| {
            let labels = apply_class_map(p.labels.clone(), &config.class_collapse);
            let dets = apply_class_map(p.detections.clone(), &config.class_collapse);
            let regions: Vec<Box2D> = labels.iter().filter(|l| l.is_dont_care()).map(|l| l.bbox).collect();
            let detections: Vec<Detection> = dets
                .iter()
                .filter(|d| d.object.class_name == class)
                .map(detection_from_record)
                .collect();
            let detections = if config.dontcare.enabled {
                suppress_dontcare(detections, &regions, config.dontcare.overlap_threshold)
            } else {
                detections
            };
            let labels = labels
                .iter()
                .filter(|l| l.class_name == class)
                .map(label_from_record)
                .collect();
            Frame::new(p.frame_id.clone(), detections, labels)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(class: &str) -> LabelRecord {
        parse_label_line(&format!("{class} 0 0 0 0 0 10 10 1 1 1 0 0 10 0"), 1).unwrap()
    }

    #[test]
    fn class_map_is_single_pass() {
        let map: BTreeMap<String, String> = [("Van", "Car"), ("Car", "Vehicle")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let out = apply_class_map(vec![label("Van"), label("Car"), label("Cyclist")], &map);
        let names: Vec<_> = out.iter().map(|r| r.class_name.as_str()).collect();
        assert_eq!(names, vec!["Car", "Vehicle", "Cyclist"]);
        let same = apply_class_map(vec![label("Van")], &BTreeMap::new());
        assert_eq!(same[0].class_name, "Van");
    }

    #[test]
    fn dontcare_suppression() {
        let b = |l, t, r, bo| Box2D::new(l, t, r, bo).unwrap();
        let inside = Detection::new(b(2.0, 2.0, 4.0, 4.0), 0.9);
        let half = Detection::new(b(-2.0, 0.0, 2.0, 2.0), 0.9);
        let region = [b(0.0, 0.0, 10.0, 10.0)];
        let kept = suppress_dontcare(vec![inside.clone(), half.clone()], &region, 0.7);
        assert_eq!(kept, vec![half.clone()]);
        let kept = suppress_dontcare(vec![inside.clone()], &region, 1.0);
        assert!(kept.is_empty());
        let kept = suppress_dontcare(vec![inside.clone(), half.clone()], &[], 0.5);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn score_transforms() {
        let det = |s: f64| DetectionRecord { object: label("Car"), score: s };
        let mut frames = vec![FramePair {
            frame_id: "0".into(),
            labels: vec![],
            detections: vec![det(-2.0), det(3.0), det(0.5)],
        }];
        assert!(apply_score_transform(&mut frames, ScoreTransform::None).is_err());
        let mut mm = frames.clone();
        apply_score_transform(&mut mm, ScoreTransform::Minmax).unwrap();
        let s: Vec<f64> = mm[0].detections.iter().map(|d| d.score).collect();
        assert_eq!(s, vec![0.0, 1.0, 0.5]);
        apply_score_transform(&mut frames, ScoreTransform::Sigmoid).unwrap();
        assert!(frames[0].detections.iter().all(|d| (0.0..=1.0).contains(&d.score)));
        assert!(apply_score_transform(&mut frames, ScoreTransform::None).is_ok());
    }
}
