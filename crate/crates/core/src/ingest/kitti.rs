//! KITTI object label / result lines.
//!
//! A label line has 15 whitespace-separated fields: type, truncated,
//! occluded, alpha, bbox (left top right bottom), dimensions (h w l),
//! location (x y z), rotation_y. Result files append a 16th field, the
//! score.

use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::geometry::Box2D;

pub const LABEL_FIELDS: usize = 15;
pub const DETECTION_FIELDS: usize = 16;
pub const DONT_CARE: &str = "DontCare";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Label,
    Detection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub class_name: String,
    /// `None` for the `-1` sentinel.
    pub truncation: Option<f64>,
    /// `None` for the `-1` sentinel.
    pub occlusion: Option<u8>,
    pub alpha: f64,
    pub bbox: Box2D,
    pub dimensions_hwl: [f64; 3],
    pub location_xyz: [f64; 3],
    pub rotation_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    #[serde(flatten)]
    pub object: LabelRecord,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KittiRecord {
    Label(LabelRecord),
    Detection(DetectionRecord),
}

/// Parses `-?digits[.digits]` or `-?.digits`. No exponents, signs other than
/// a leading minus, or special values.
pub fn parse_strict_number(token: &str) -> Option<f64> {
    let body = token.strip_prefix('-').unwrap_or(token);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    let ok = match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => digits(int) && digits(f) && !(int.is_empty() && f.is_empty()),
    };
    if !ok {
        return None;
    }
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_strict_int(token: &str) -> Option<i64> {
    let body = token.strip_prefix('-').unwrap_or(token);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

struct Fields<'a> {
    tokens: Vec<&'a str>,
    line: usize,
}

impl Fields<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> IngestError {
        IngestError::Parse {
            file: None,
            line: self.line,
            column,
            message: message.into(),
        }
    }

    /// `column` is 1-based.
    fn number(&self, column: usize, name: &str) -> Result<f64, IngestError> {
        let t = self.tokens[column - 1];
        parse_strict_number(t).ok_or_else(|| self.err(column, format!("{name}: `{t}` is not a number")))
    }
}

pub fn parse_kitti_line(text: &str, kind: LineKind, line: usize) -> Result<KittiRecord, IngestError> {
    Ok(match kind {
        LineKind::Label => KittiRecord::Label(parse_label_line(text, line)?),
        LineKind::Detection => KittiRecord::Detection(parse_detection_line(text, line)?),
    })
}

pub fn parse_label_line(text: &str, line: usize) -> Result<LabelRecord, IngestError> {
    let fields = split(text, line, LABEL_FIELDS)?;
    parse_object(&fields, false)
}

pub fn parse_detection_line(text: &str, line: usize) -> Result<DetectionRecord, IngestError> {
    let fields = split(text, line, DETECTION_FIELDS)?;
    let object = parse_object(&fields, true)?;
    let score = fields.number(16, "score")?;
    Ok(DetectionRecord { object, score })
}

fn split(text: &str, line: usize, expected: usize) -> Result<Fields<'_>, IngestError> {
    let tokens: Vec<&str> = text.split_ascii_whitespace().collect();
    let fields = Fields { tokens, line };
    let n = fields.tokens.len();
    if n != expected {
        let column = n.min(expected) + 1;
        return Err(fields.err(column, format!("expected {expected} fields, found {n}")));
    }
    Ok(fields)
}

fn parse_object(f: &Fields<'_>, is_detection: bool) -> Result<LabelRecord, IngestError> {
    let class_name = f.tokens[0].to_string();
    let sentinels_allowed = is_detection || class_name == DONT_CARE;

    let truncation = match f.number(2, "truncated")? {
        t if t == -1.0 && sentinels_allowed => None,
        t if (0.0..=1.0).contains(&t) => Some(t),
        t => return Err(f.err(2, format!("truncated {t} outside [0, 1]"))),
    };

    let occ_token = f.tokens[2];
    let occlusion = match parse_strict_int(occ_token) {
        Some(-1) => None,
        Some(o @ 0..=3) => Some(o as u8),
        Some(o) => return Err(f.err(3, format!("occluded {o} outside {{0, 1, 2, 3}}"))),
        None => return Err(f.err(3, format!("occluded: `{occ_token}` is not an integer"))),
    };

    let alpha = f.number(4, "alpha")?;
    let corners = [
        f.number(5, "bbox left")?,
        f.number(6, "bbox top")?,
        f.number(7, "bbox right")?,
        f.number(8, "bbox bottom")?,
    ];
    let bbox = Box2D::try_from(corners).map_err(|e| f.err(5, e.to_string()))?;
    let dimensions_hwl = [
        f.number(9, "height")?,
        f.number(10, "width")?,
        f.number(11, "length")?,
    ];
    let location_xyz = [f.number(12, "x")?, f.number(13, "y")?, f.number(14, "z")?];
    let rotation_y = f.number(15, "rotation_y")?;

    Ok(LabelRecord {
        class_name,
        truncation,
        occlusion,
        alpha,
        bbox,
        dimensions_hwl,
        location_xyz,
        rotation_y,
    })
}

impl LabelRecord {
    pub fn is_dont_care(&self) -> bool {
        self.class_name == DONT_CARE
    }

    /// Devkit-order line; parses back to an identical record.
    pub fn to_kitti_line(&self) -> String {
        let trunc = self.truncation.map_or("-1".to_string(), |t| t.to_string());
        let occ = self.occlusion.map_or("-1".to_string(), |o| o.to_string());
        let [l, t, r, b] = self.bbox.corners();
        let [h, w, len] = self.dimensions_hwl;
        let [x, y, z] = self.location_xyz;
        format!(
            "{} {trunc} {occ} {} {l} {t} {r} {b} {h} {w} {len} {x} {y} {z} {}",
            self.class_name, self.alpha, self.rotation_y
        )
    }
}

impl DetectionRecord {
    pub fn to_kitti_line(&self) -> String {
        format!("{} {}", self.object.to_kitti_line(), self.score)
    }
}
