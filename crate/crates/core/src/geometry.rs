//! Axis-aligned image-plane boxes and overlap measures.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Axis-aligned rectangle in continuous pixel coordinates, corner encoded.
///
/// Construction rejects non-finite coordinates and boxes without strictly
/// positive area, so every `Box2D` in circulation has `left < right` and
/// `top < bottom`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Box2D {
    left: f64,
    top: f64,
    right: f64,
    bottom: f64,
}

impl Box2D {
    pub fn new(left: f64, top: f64, right: f64, bottom: f64) -> Result<Self, GeometryError> {
        let corners = [left, top, right, bottom];
        if corners.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite(corners));
        }
        if left >= right || top >= bottom {
            return Err(GeometryError::Degenerate(corners));
        }
        Ok(Self {
            left,
            top,
            right,
            bottom,
        })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn bottom(&self) -> f64 {
        self.bottom
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn corners(&self) -> [f64; 4] {
        [self.left, self.top, self.right, self.bottom]
    }

    /// Area of the intersection with `other`; zero when disjoint or touching.
    pub fn intersection_area(&self, other: &Box2D) -> f64 {
        let w = self.right.min(other.right) - self.left.max(other.left);
        let h = self.bottom.min(other.bottom) - self.top.max(other.top);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }
}

impl TryFrom<[f64; 4]> for Box2D {
    type Error = GeometryError;

    fn try_from(c: [f64; 4]) -> Result<Self, Self::Error> {
        Box2D::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Box2D> for [f64; 4] {
    fn from(b: Box2D) -> Self {
        b.corners()
    }
}

/// Intersection over union. Symmetric, in `[0, 1]`.
pub fn iou(a: &Box2D, b: &Box2D) -> f64 {
    if a == b {
        return 1.0;
    }
    let inter = a.intersection_area(b);
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Fraction of `a` covered by `region`. Not symmetric.
pub fn overlap_over_area(a: &Box2D, region: &Box2D) -> f64 {
    (a.intersection_area(region) / a.area()).clamp(0.0, 1.0)
}

/// Dense IoU matrix, rows indexed by `rows`, columns by `cols`.
pub fn iou_matrix(rows: &[Box2D], cols: &[Box2D]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| cols.iter().map(|c| iou(r, c)).collect())
        .collect()
}

/// Expected depth error of a stereo rig at range `z`, from the first-order
/// relation `dz = z^2 / (baseline * focal) * dD`.
pub fn expected_stereo_depth_error(
    z: f64,
    baseline: f64,
    focal: f64,
    disparity_error: f64,
) -> Result<f64, GeometryError> {
    for (name, v) in [("z", z), ("baseline", baseline), ("focal", focal)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(GeometryError::Domain { name, value: v });
        }
    }
    // A perfect disparity estimate is allowed and gives zero error.
    if !(disparity_error.is_finite() && disparity_error >= 0.0) {
        return Err(GeometryError::Domain {
            name: "disparity_error",
            value: disparity_error,
        });
    }
    Ok(z * z * disparity_error / (baseline * focal))
}
