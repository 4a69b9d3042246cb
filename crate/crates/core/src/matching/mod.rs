//! Detection-label association.
//!
//! [`optimal_match`] solves the assignment problem on the
//! [`ScaledAdjacency`], which yields the association with the most true
//! positives and, among those, the highest total IoU. [`greedy_match`]
//! reproduces the sequential association of the common toolkits and
//! [`brute_force_match`] is an exhaustive oracle for small problems.

mod adjacency;
mod brute;
mod greedy;
mod hungarian;
pub mod scenario;

use serde::{Deserialize, Serialize};

pub use adjacency::{build_adjacency, scaled_entry, ScaledAdjacency, MAX_DIMENSION};
pub use brute::{brute_force_match, brute_force_match_iou, BRUTE_FORCE_LIMIT};
pub use greedy::{greedy_match, greedy_match_iou, GreedyOrder};
pub use hungarian::max_weight_assignment;
pub use scenario::{generate_scenario, Scenario, ScenarioParams};

use crate::error::MatchError;
use crate::geometry::{iou_matrix, Box2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub detection: usize,
    pub label: usize,
    pub iou: f64,
}

/// An injective association of detections to labels plus the residue.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Matching {
    /// Sorted by detection index.
    pub pairs: Vec<MatchedPair>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_labels: Vec<usize>,
}

impl Matching {
    /// Assembles a matching from `(detection, label, iou)` pairs, deriving the
    /// residue from the problem size.
    pub(crate) fn from_pairs(
        mut pairs: Vec<MatchedPair>,
        num_detections: usize,
        num_labels: usize,
    ) -> Self {
        pairs.sort_by_key(|p| p.detection);
        let mut det_used = vec![false; num_detections];
        let mut lab_used = vec![false; num_labels];
        for p in &pairs {
            det_used[p.detection] = true;
            lab_used[p.label] = true;
        }
        let unused = |used: Vec<bool>| -> Vec<usize> {
            used.iter()
                .enumerate()
                .filter(|(_, &u)| !u)
                .map(|(i, _)| i)
                .collect()
        };
        Self {
            pairs,
            unmatched_detections: unused(det_used),
            unmatched_labels: unused(lab_used),
        }
    }

    pub fn unmatched(num_detections: usize, num_labels: usize) -> Self {
        Self::from_pairs(Vec::new(), num_detections, num_labels)
    }

    pub fn total_iou(&self) -> f64 {
        self.pairs.iter().map(|p| p.iou).sum()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Checks injectivity, the partition of both index sets, and the IoU
    /// floor. Returns a description of the first violation.
    pub fn check(&self, num_detections: usize, num_labels: usize, tau: f64) -> Result<(), String> {
        let mut det_seen = vec![0u32; num_detections];
        let mut lab_seen = vec![0u32; num_labels];
        for p in &self.pairs {
            if p.detection >= num_detections || p.label >= num_labels {
                return Err(format!("pair {p:?} out of range"));
            }
            if p.iou < tau {
                return Err(format!("pair {p:?} below tau {tau}"));
            }
            det_seen[p.detection] += 1;
            lab_seen[p.label] += 1;
        }
        for &d in &self.unmatched_detections {
            *det_seen.get_mut(d).ok_or("unmatched detection out of range")? += 1;
        }
        for &l in &self.unmatched_labels {
            *lab_seen.get_mut(l).ok_or("unmatched label out of range")? += 1;
        }
        if let Some(d) = det_seen.iter().position(|&c| c != 1) {
            return Err(format!("detection {d} covered {} times", det_seen[d]));
        }
        if let Some(l) = lab_seen.iter().position(|&c| c != 1) {
            return Err(format!("label {l} covered {} times", lab_seen[l]));
        }
        Ok(())
    }
}

/// Maximum-weight assignment over the scaled matrix. Completion artifacts
/// (zero-weight assignments) are returned as unmatched residue.
pub fn optimal_match(adj: &ScaledAdjacency) -> Matching {
    let assignment = max_weight_assignment(&adj.entries);
    let pairs = assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| adj.entries[i][j] > 0.0)
        .map(|(i, &j)| MatchedPair {
            detection: i,
            label: j,
            iou: adj.raw_iou[i][j],
        })
        .collect();
    Matching::from_pairs(pairs, adj.num_detections, adj.num_labels)
}

/// [`optimal_match`] on a precomputed IoU table; an empty problem yields an
/// empty matching instead of an error.
pub fn optimal_match_iou(
    iou: &[Vec<f64>],
    num_detections: usize,
    num_labels: usize,
    tau: f64,
) -> Result<Matching, MatchError> {
    adjacency::check_tau(tau)?;
    if num_detections == 0 || num_labels == 0 {
        return Ok(Matching::unmatched(num_detections, num_labels));
    }
    let adj = ScaledAdjacency::from_iou(iou, num_detections, num_labels, tau)?;
    Ok(optimal_match(&adj))
}

pub fn optimal_match_boxes(
    detections: &[Box2D],
    labels: &[Box2D],
    tau: f64,
) -> Result<Matching, MatchError> {
    optimal_match_iou(
        &iou_matrix(detections, labels),
        detections.len(),
        labels.len(),
        tau,
    )
}

/// Association strategy selectable in an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Matcher {
    Optimal,
    GreedyConfidence,
    BruteForce,
}

impl Matcher {
    pub fn as_str(&self) -> &'static str {
        match self {
            Matcher::Optimal => "optimal",
            Matcher::GreedyConfidence => "greedy-confidence",
            Matcher::BruteForce => "brute-force",
        }
    }

    /// Runs the matcher on an IoU table whose rows are the detections with
    /// the given `scores`.
    pub fn run(
        &self,
        iou: &[Vec<f64>],
        scores: &[f64],
        num_labels: usize,
        tau: f64,
    ) -> Result<Matching, MatchError> {
        match self {
            Matcher::Optimal => optimal_match_iou(iou, scores.len(), num_labels, tau),
            Matcher::GreedyConfidence => {
                greedy_match_iou(iou, scores, num_labels, tau, GreedyOrder::ConfidenceDescending)
            }
            Matcher::BruteForce => brute_force_match_iou(iou, scores.len(), num_labels, tau),
        }
    }
}

impl std::str::FromStr for Matcher {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimal" => Ok(Matcher::Optimal),
            "greedy" | "greedy-confidence" => Ok(Matcher::GreedyConfidence),
            "brute-force" => Ok(Matcher::BruteForce),
            other => Err(format!(
                "unknown matcher `{other}` (expected optimal, greedy-confidence or brute-force)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn b(l: f64, t: f64, r: f64, bo: f64) -> Box2D {
        Box2D::new(l, t, r, bo).unwrap()
    }

    #[test]
    fn greedy_trap_scaled_entries_select_two_pairs() {
        let adj = ScaledAdjacency::from_iou(&[vec![0.56, 0.72], vec![0.3, 0.56]], 2, 2, 0.5)
            .unwrap();
        let m = optimal_match(&adj);
        let idx: Vec<_> = m.pairs.iter().map(|p| (p.detection, p.label)).collect();
        assert_eq!(idx, vec![(0, 0), (1, 1)]);
        assert!(m.unmatched_detections.is_empty() && m.unmatched_labels.is_empty());
    }

    #[test]
    fn empty_detections_leave_all_labels_unmatched() {
        let labels = vec![b(0.0, 0.0, 1.0, 1.0), b(2.0, 0.0, 3.0, 1.0), b(4.0, 0.0, 5.0, 1.0)];
        let adj = build_adjacency(&[], &labels, 0.5).unwrap();
        let m = optimal_match(&adj);
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_labels, vec![0, 1, 2]);
        assert_eq!(optimal_match_boxes(&[], &[], 0.5).unwrap(), Matching::default());
    }

    #[test]
    fn zero_entries_are_not_emitted() {
        let dets = vec![b(0.0, 0.0, 1.0, 1.0), b(10.0, 0.0, 11.0, 1.0)];
        let labels = vec![b(0.0, 0.0, 1.0, 1.0)];
        let m = optimal_match_boxes(&dets, &labels, 0.5).unwrap();
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.unmatched_detections, vec![1]);
        m.check(2, 1, 0.5).unwrap();
    }

    #[test]
    fn check_flags_double_association() {
        let m = Matching {
            pairs: vec![
                MatchedPair { detection: 0, label: 0, iou: 0.9 },
                MatchedPair { detection: 1, label: 0, iou: 0.9 },
            ],
            unmatched_detections: vec![],
            unmatched_labels: vec![],
        };
        assert!(m.check(2, 1, 0.5).is_err());
    }

    #[test]
    fn matcher_parses() {
        assert_eq!("optimal".parse::<Matcher>(), Ok(Matcher::Optimal));
        assert_eq!("greedy-confidence".parse::<Matcher>(), Ok(Matcher::GreedyConfidence));
        assert!("hungarian".parse::<Matcher>().is_err());
    }
}
