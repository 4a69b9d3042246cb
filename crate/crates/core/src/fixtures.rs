//! Small hand-built scenes with known association outcomes.

use crate::frame::{Detection, Frame, Label};
use crate::geometry::Box2D;

/// Panics on an invalid box; for literals only.
pub fn bx(l: f64, t: f64, r: f64, b: f64) -> Box2D {
    Box2D::new(l, t, r, b).unwrap()
}

/// Boxes spanning y 0..50 with the given horizontal extent.
pub fn strip(l: f64, r: f64) -> Box2D {
    bx(l, 0.0, r, 50.0)
}

/// Labels L0 = [0, 50], L1 = [7, 57]; detections D0 = [8, 75] (more
/// confident), D1 = [15, 82]. D0 overlaps L1 best, which leaves D1 without
/// a partner under greedy association at tau = 0.5.
pub fn greedy_trap() -> Frame {
    Frame::new(
        "greedy_trap",
        vec![
            Detection::new(strip(8.0, 75.0), 0.9),
            Detection::new(strip(15.0, 82.0), 0.8),
        ],
        vec![Label::new(strip(0.0, 50.0)), Label::new(strip(7.0, 57.0))],
    )
}

/// Width-100 strips alternating detection / label with starts
/// 0, 32, 37, 69, 74, 106. Neighbours overlap at IoU 0.515 or 0.905.
pub fn chain3() -> (Vec<Box2D>, Vec<Box2D>) {
    let s = |x: f64| strip(x, x + 100.0);
    (vec![s(0.0), s(37.0), s(74.0)], vec![s(32.0), s(69.0), s(106.0)])
}

/// One detection identical to a narrow label, plus a wider label it also
/// overlaps above tau = 0.7.
pub fn badgame() -> Frame {
    Frame::new(
        "badgame",
        vec![Detection::new(bx(0.0, 0.0, 0.6, 1.0), 0.9)],
        vec![Label::new(bx(0.0, 0.0, 0.6, 1.0)), Label::new(bx(0.0, 0.0, 0.7, 1.0))],
    )
}

/// Scores of the ten-detection ranking fixture, descending.
pub const RANKED_SCORES: [f64; 10] = [0.97, 0.92, 0.87, 0.82, 0.77, 0.72, 0.67, 0.62, 0.57, 0.52];
/// Whether each ranked detection is a true positive.
pub const RANKED_OUTCOMES: [bool; 10] = [true, true, false, true, false, true, true, false, true, false];

/// Eight disjoint labels; the true-positive detections copy labels 0..6 in
/// rank order, false positives sit in empty space.
pub fn ranked_frame() -> Frame {
    let labels: Vec<Label> = (0..8)
        .map(|i| Label::new(bx(100.0 * i as f64, 0.0, 100.0 * i as f64 + 60.0, 60.0)))
        .collect();
    let mut next_label = 0;
    let mut next_fp = 0;
    let detections = RANKED_SCORES
        .iter()
        .zip(RANKED_OUTCOMES)
        .map(|(&s, tp)| {
            let b = if tp {
                next_label += 1;
                labels[next_label - 1].bbox
            } else {
                next_fp += 1;
                let x = 100.0 * next_fp as f64;
                bx(x, 500.0, x + 60.0, 560.0)
            };
            Detection::new(b, s)
        })
        .collect();
    Frame::new("ranked", detections, labels)
}

/// A detection 10% wider than its label (IoU 0.9) whose area alone passes
/// `both.area >= 100` while the label's does not.
pub fn area_split() -> Frame {
    Frame::new(
        "area-split",
        vec![Detection::new(bx(0.0, 0.0, 11.0, 10.0), 0.8)],
        vec![Label::new(bx(0.0, 0.0, 9.9, 10.0))],
    )
}

/// Model A: one exact detection at confidence 0.9. Model B: the same plus a
/// disjoint false positive at 0.01.
pub fn brier_models() -> (Frame, Frame) {
    let b = bx(10.0, 10.0, 60.0, 60.0);
    let a = Frame::new("0", vec![Detection::new(b, 0.9)], vec![Label::new(b)]);
    let mut with_fp = a.clone();
    with_fp.detections.push(Detection::new(bx(200.0, 10.0, 250.0, 60.0), 0.01));
    (a, with_fp)
}
