//! Engine-level records: what the matchers, filters and metrics consume.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Box2D;

/// Named scalar attributes attached to a record. `None` marks a value the
/// source declared unknown (e.g. a `-1` sentinel).
pub type Attributes = BTreeMap<String, Option<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: Box2D,
    pub score: f64,
    #[serde(default)]
    pub attributes: Attributes,
}

impl Detection {
    pub fn new(bbox: Box2D, score: f64) -> Self {
        Self {
            bbox,
            score,
            attributes: Attributes::new(),
        }
    }

    pub fn with_attribute(mut self, key: &str, value: Option<f64>) -> Self {
        self.attributes.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub bbox: Box2D,
    #[serde(default)]
    pub attributes: Attributes,
}

impl Label {
    pub fn new(bbox: Box2D) -> Self {
        Self {
            bbox,
            attributes: Attributes::new(),
        }
    }

    pub fn with_attribute(mut self, key: &str, value: Option<f64>) -> Self {
        self.attributes.insert(key.to_string(), value);
        self
    }
}

/// One image worth of detections and labels for a single class.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Frame {
    pub id: String,
    pub detections: Vec<Detection>,
    pub labels: Vec<Label>,
}

impl Frame {
    pub fn new(id: impl Into<String>, detections: Vec<Detection>, labels: Vec<Label>) -> Self {
        Self {
            id: id.into(),
            detections,
            labels,
        }
    }

    pub fn detection_boxes(&self) -> Vec<Box2D> {
        self.detections.iter().map(|d| d.bbox).collect()
    }

    pub fn label_boxes(&self) -> Vec<Box2D> {
        self.labels.iter().map(|l| l.bbox).collect()
    }
}
