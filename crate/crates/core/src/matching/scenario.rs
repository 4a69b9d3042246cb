//! Seeded synthetic scenes for fuzzing the matchers and filters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frame::{Detection, Frame, Label};
use crate::geometry::Box2D;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub detections: Vec<Detection>,
    pub labels: Vec<Label>,
}

impl Scenario {
    pub fn detection_boxes(&self) -> Vec<Box2D> {
        self.detections.iter().map(|d| d.bbox).collect()
    }

    pub fn label_boxes(&self) -> Vec<Box2D> {
        self.labels.iter().map(|l| l.bbox).collect()
    }

    pub fn scored_detections(&self) -> Vec<(Box2D, f64)> {
        self.detections.iter().map(|d| (d.bbox, d.score)).collect()
    }

    pub fn size(&self) -> usize {
        self.detections.len() + self.labels.len()
    }

    pub fn into_frame(self, id: impl Into<String>) -> Frame {
        Frame::new(id, self.detections, self.labels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Inclusive range of detection counts.
    pub detections: (usize, usize),
    /// Inclusive range of label counts.
    pub labels: (usize, usize),
    pub frame_width: f64,
    pub frame_height: f64,
    /// Probability that a new box is placed as a perturbed copy of an
    /// existing label rather than in an empty cell. Zero gives pairwise
    /// disjoint boxes.
    pub overlap_bias: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            detections: (0, 7),
            labels: (0, 7),
            frame_width: 1242.0,
            frame_height: 375.0,
            overlap_bias: 0.5,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.detections.0 > self.detections.1 || self.labels.0 > self.labels.1 {
            return Err("count ranges must satisfy min <= max".into());
        }
        if !(self.frame_width > 0.0 && self.frame_height > 0.0) {
            return Err("frame size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.overlap_bias) {
            return Err(format!("overlap bias {} outside [0, 1]", self.overlap_bias));
        }
        Ok(())
    }
}

/// Deterministic for a given `(seed, params)` on every platform.
///
/// # Panics
/// If `params` fails [`ScenarioParams::validate`].
pub fn generate_scenario(seed: u64, params: &ScenarioParams) -> Scenario {
    if let Err(e) = params.validate() {
        panic!("invalid scenario parameters: {e}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_labels = rng.gen_range(params.labels.0..=params.labels.1);
    let num_dets = rng.gen_range(params.detections.0..=params.detections.1);

    let mut cells = CellGrid::new(num_labels + num_dets, params, &mut rng);

    let mut labels: Vec<Label> = Vec::with_capacity(num_labels);
    for i in 0..num_labels {
        let bbox = if i > 0 && rng.gen_bool(params.overlap_bias) {
            let anchor = labels[rng.gen_range(0..i)].bbox;
            jitter(&anchor, &mut rng)
        } else {
            cells.fresh_box(&mut rng)
        };
        let label = Label::new(bbox)
            .with_attribute("truncation", Some(rng.gen_range(0..=10) as f64 / 20.0))
            .with_attribute("occlusion", Some(rng.gen_range(0..=2) as f64))
            .with_attribute("distance", Some(rng.gen_range(5.0..80.0)));
        labels.push(label);
    }

    let mut detections = Vec::with_capacity(num_dets);
    for _ in 0..num_dets {
        let bbox = if num_labels > 0 && rng.gen_bool(params.overlap_bias) {
            let anchor = labels[rng.gen_range(0..num_labels)].bbox;
            jitter(&anchor, &mut rng)
        } else {
            cells.fresh_box(&mut rng)
        };
        let score = rng.gen_range(1..=100) as f64 / 100.0;
        detections.push(Detection::new(bbox, score));
    }

    Scenario { detections, labels }
}

/// Hands out boxes confined to distinct grid cells, so boxes from different
/// cells never intersect.
struct CellGrid {
    cell_w: f64,
    cell_h: f64,
    cols: usize,
    free: Vec<usize>,
}

impl CellGrid {
    fn new(needed: usize, params: &ScenarioParams, rng: &mut ChaCha8Rng) -> Self {
        let needed = needed.max(1);
        let aspect = params.frame_width / params.frame_height;
        let cols = ((needed as f64 * aspect).sqrt().ceil() as usize).max(1);
        let rows = needed.div_ceil(cols).max(1);
        let mut free: Vec<usize> = (0..cols * rows).collect();
        free.shuffle(rng);
        Self {
            cell_w: params.frame_width / cols as f64,
            cell_h: params.frame_height / rows as f64,
            cols,
            free,
        }
    }

    fn fresh_box(&mut self, rng: &mut ChaCha8Rng) -> Box2D {
        let cell = self.free.pop().expect("grid sized for every box");
        let (cx, cy) = ((cell % self.cols) as f64, (cell / self.cols) as f64);
        let w = self.cell_w * rng.gen_range(0.4..0.9);
        let h = self.cell_h * rng.gen_range(0.4..0.9);
        let slack_x = self.cell_w * 0.95 - w;
        let slack_y = self.cell_h * 0.95 - h;
        let left = cx * self.cell_w + self.cell_w * 0.025 + rng.gen_range(0.0..slack_x);
        let top = cy * self.cell_h + self.cell_h * 0.025 + rng.gen_range(0.0..slack_y);
        Box2D::new(left, top, left + w, top + h).expect("positive size")
    }
}

fn jitter(anchor: &Box2D, rng: &mut ChaCha8Rng) -> Box2D {
    let (w, h) = (anchor.width(), anchor.height());
    let nw = w * rng.gen_range(0.75..1.3);
    let nh = h * rng.gen_range(0.8..1.25);
    let left = anchor.left() + w * rng.gen_range(-0.35..0.35);
    let top = anchor.top() + h * rng.gen_range(-0.2..0.2);
    Box2D::new(left, top, left + nw, top + nh).expect("positive size")
}
