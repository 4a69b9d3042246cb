//! Confusion counts, precision-recall curves, AP, Brier scores and
//! calibration curves.

mod ap;
mod brier;
mod curve;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

pub use ap::{average_precision, monotone_envelope, ApMode};
pub use brier::{
    bin_samples, brier_score, calibration_curve, calibration_distance, operating_point, BrierSupport,
    BrierTally, CalibrationBin,
};
pub use curve::{curves_for_filters, match_at_threshold, pr_curve, CurvePoint, PreparedFrame};

use crate::error::MetricsError;
use crate::matching::{Matcher, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        Self { tp, fp, fn_ }
    }

    /// `tp / (tp + fp)`, or 1 when nothing was detected.
    pub fn precision(&self) -> f64 {
        ratio_or_one(self.tp, self.tp + self.fp)
    }

    /// `tp / (tp + fn)`, or 1 when there is nothing to find.
    pub fn recall(&self) -> f64 {
        ratio_or_one(self.tp, self.tp + self.fn_)
    }

    /// Component-wise `<=`.
    pub fn dominated_by(&self, other: &ConfusionCounts) -> bool {
        self.tp <= other.tp && self.fp <= other.fp && self.fn_ <= other.fn_
    }
}

fn ratio_or_one(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.tp + rhs.tp, self.fp + rhs.fp, self.fn_ + rhs.fn_)
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

impl fmt::Display for ConfusionCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tp={} fp={} fn={}", self.tp, self.fp, self.fn_)
    }
}

pub fn counts_from_matching(matching: &Matching) -> ConfusionCounts {
    ConfusionCounts::new(
        matching.pairs.len(),
        matching.unmatched_detections.len(),
        matching.unmatched_labels.len(),
    )
}

/// Confidence thresholds at which a curve is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdGrid {
    /// Every distinct score, subsampled to at most [`MAX_UNIQUE_THRESHOLDS`].
    UniqueScores,
    /// `n` evenly spaced thresholds from 1 down to 0.
    Fixed(usize),
}

pub const MAX_UNIQUE_THRESHOLDS: usize = 1001;

impl ThresholdGrid {
    /// Thresholds in descending order. `scores` need not be sorted.
    pub fn thresholds(&self, scores: &[f64]) -> Vec<f64> {
        match *self {
            ThresholdGrid::Fixed(n) if n <= 1 => vec![0.0],
            ThresholdGrid::Fixed(n) => (0..n).rev().map(|k| k as f64 / (n - 1) as f64).collect(),
            ThresholdGrid::UniqueScores => {
                let mut s = scores.to_vec();
                s.sort_by(|a, b| b.total_cmp(a));
                s.dedup();
                if s.is_empty() {
                    return vec![1.0];
                }
                if s.len() <= MAX_UNIQUE_THRESHOLDS {
                    return s;
                }
                let last = (s.len() - 1) as f64;
                let step = last / (MAX_UNIQUE_THRESHOLDS - 1) as f64;
                (0..MAX_UNIQUE_THRESHOLDS)
                    .map(|i| s[((i as f64 * step).round() as usize).min(s.len() - 1)])
                    .collect()
            }
        }
    }
}

impl fmt::Display for ThresholdGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdGrid::UniqueScores => f.write_str("unique"),
            ThresholdGrid::Fixed(n) => write!(f, "fixed:{n}"),
        }
    }
}

impl std::str::FromStr for ThresholdGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "unique" {
            return Ok(ThresholdGrid::UniqueScores);
        }
        s.strip_prefix("fixed:")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .map(ThresholdGrid::Fixed)
            .ok_or_else(|| format!("invalid grid `{s}` (expected unique or fixed:N)"))
    }
}

impl Serialize for ThresholdGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ThresholdGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DontCarePolicy {
    pub enabled: bool,
    pub overlap_threshold: f64,
}

impl Default for DontCarePolicy {
    fn default() -> Self {
        Self {
            enabled: true,
            overlap_threshold: 0.5,
        }
    }
}

/// Maps raw detector scores into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreTransform {
    #[default]
    None,
    Sigmoid,
    Minmax,
}

impl std::str::FromStr for ScoreTransform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ScoreTransform::None),
            "sigmoid" => Ok(ScoreTransform::Sigmoid),
            "minmax" => Ok(ScoreTransform::Minmax),
            other => Err(format!("unknown score transform `{other}` (expected none, sigmoid or minmax)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub tau: f64,
    pub matcher: Matcher,
    pub min_confidence: f64,
    pub threshold_grid: ThresholdGrid,
    pub ap_mode: ApMode,
    /// Support used for headline summaries; all three are always reported.
    pub brier_support: BrierSupport,
    pub calibration_bins: usize,
    pub class_collapse: BTreeMap<String, String>,
    pub dontcare: DontCarePolicy,
    pub score_transform: ScoreTransform,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            tau: 0.7,
            matcher: Matcher::Optimal,
            min_confidence: 0.0,
            threshold_grid: ThresholdGrid::UniqueScores,
            ap_mode: ApMode::AllPoints,
            brier_support: BrierSupport::Labels,
            calibration_bins: 10,
            class_collapse: BTreeMap::new(),
            dontcare: DontCarePolicy::default(),
            score_transform: ScoreTransform::None,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let bad = |m: String| Err(MetricsError::InvalidConfig(m));
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad(format!("tau must lie in (0, 1], got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return bad(format!("min_confidence must lie in [0, 1], got {}", self.min_confidence));
        }
        if self.calibration_bins < 2 {
            return bad(format!("calibration_bins must be at least 2, got {}", self.calibration_bins));
        }
        if let ThresholdGrid::Fixed(0) = self.threshold_grid {
            return bad("fixed grid needs at least one threshold".into());
        }
        let t = self.dontcare.overlap_threshold;
        if self.dontcare.enabled && !(t > 0.0 && t <= 1.0) {
            return bad(format!("DontCare overlap threshold must lie in (0, 1], got {t}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_from_greedy_trap_matchings() {
        use crate::matching::MatchedPair;
        let optimal = Matching {
            pairs: vec![
                MatchedPair { detection: 0, label: 0, iou: 0.56 },
                MatchedPair { detection: 1, label: 1, iou: 0.56 },
            ],
            ..Default::default()
        };
        assert_eq!(counts_from_matching(&optimal), ConfusionCounts::new(2, 0, 0));
        let greedy = Matching {
            pairs: vec![MatchedPair { detection: 0, label: 1, iou: 0.72 }],
            unmatched_detections: vec![1],
            unmatched_labels: vec![0],
        };
        assert_eq!(counts_from_matching(&greedy), ConfusionCounts::new(1, 1, 1));
        assert_eq!(counts_from_matching(&Matching::default()), ConfusionCounts::default());
    }

    #[test]
    fn empty_denominators() {
        let c = ConfusionCounts::default();
        assert_eq!(c.precision(), 1.0);
        assert_eq!(c.recall(), 1.0);
        assert_eq!(ConfusionCounts::new(0, 0, 3).recall(), 0.0);
    }

    #[test]
    fn grids() {
        let g = ThresholdGrid::Fixed(41).thresholds(&[]);
        assert_eq!(g.len(), 41);
        assert_eq!((g[0], g[40], g[20]), (1.0, 0.0, 0.5));
        let u = ThresholdGrid::UniqueScores.thresholds(&[0.2, 0.9, 0.2, 0.5]);
        assert_eq!(u, vec![0.9, 0.5, 0.2]);
        assert_eq!(ThresholdGrid::UniqueScores.thresholds(&[]), vec![1.0]);
        let many: Vec<f64> = (0..5000).map(|i| i as f64 / 5000.0).collect();
        let s = ThresholdGrid::UniqueScores.thresholds(&many);
        assert_eq!(s.len(), MAX_UNIQUE_THRESHOLDS);
        assert_eq!((s[0], *s.last().unwrap()), (4999.0 / 5000.0, 0.0));
        assert!(s.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn grid_text_round_trip() {
        for g in [ThresholdGrid::UniqueScores, ThresholdGrid::Fixed(41)] {
            assert_eq!(g.to_string().parse::<ThresholdGrid>(), Ok(g));
        }
        assert!("fixed:".parse::<ThresholdGrid>().is_err());
        assert!("fixed:0".parse::<ThresholdGrid>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EvalConfig::default().validate().is_ok());
        let bad = EvalConfig { tau: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = EvalConfig { calibration_bins: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = EvalConfig { min_confidence: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
