use serde::{Deserialize, Serialize};

use super::{adjacency::check_tau, MatchedPair, Matching};
use crate::error::MatchError;
use crate::geometry::{iou_matrix, Box2D};

/// Order in which the greedy matcher visits detections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyOrder {
    /// Highest confidence first; equal confidences by lower input index.
    ConfidenceDescending,
    InputOrder,
}

/// Sequential association: each detection in turn claims the unclaimed
/// label of highest IoU at or above `tau` (lower label index on ties).
pub fn greedy_match(
    detections: &[(Box2D, f64)],
    labels: &[Box2D],
    tau: f64,
    order: GreedyOrder,
) -> Result<Matching, MatchError> {
    let boxes: Vec<Box2D> = detections.iter().map(|d| d.0).collect();
    let scores: Vec<f64> = detections.iter().map(|d| d.1).collect();
    greedy_match_iou(&iou_matrix(&boxes, labels), &scores, labels.len(), tau, order)
}

pub fn greedy_match_iou(
    iou: &[Vec<f64>],
    scores: &[f64],
    num_labels: usize,
    tau: f64,
    order: GreedyOrder,
) -> Result<Matching, MatchError> {
    check_tau(tau)?;
    let mut visit: Vec<usize> = (0..scores.len()).collect();
    if order == GreedyOrder::ConfidenceDescending {
        // Stable sort keeps lower indices first among equal scores.
        visit.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    }

    let mut claimed = vec![false; num_labels];
    let mut pairs = Vec::new();
    for d in visit {
        let mut best: Option<(usize, f64)> = None;
        for (l, &x) in iou[d].iter().enumerate() {
            if claimed[l] || x < tau {
                continue;
            }
            if best.is_none_or(|(_, bx)| x > bx) {
                best = Some((l, x));
            }
        }
        if let Some((l, x)) = best {
            claimed[l] = true;
            pairs.push(MatchedPair {
                detection: d,
                label: l,
                iou: x,
            });
        }
    }
    Ok(Matching::from_pairs(pairs, scores.len(), num_labels))
}
