use super::{adjacency::check_tau, MatchedPair, Matching};
use crate::error::MatchError;
use crate::geometry::{iou_matrix, Box2D};

/// Exhaustive search is only offered as a test oracle.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Enumerates every injective partial assignment and returns the
/// lexicographic optimum: most pairs, then largest total IoU, then the
/// smallest `(detection, label)` sequence.
pub fn brute_force_match(
    detections: &[Box2D],
    labels: &[Box2D],
    tau: f64,
) -> Result<Matching, MatchError> {
    brute_force_match_iou(
        &iou_matrix(detections, labels),
        detections.len(),
        labels.len(),
        tau,
    )
}

pub fn brute_force_match_iou(
    iou: &[Vec<f64>],
    num_detections: usize,
    num_labels: usize,
    tau: f64,
) -> Result<Matching, MatchError> {
    check_tau(tau)?;
    let n = num_detections.max(num_labels);
    if n > BRUTE_FORCE_LIMIT {
        return Err(MatchError::BruteForceLimit {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let mut search = Search {
        iou,
        tau,
        num_labels,
        used: vec![false; num_labels],
        current: Vec::with_capacity(n),
        best: None,
    };
    search.visit(0, 0.0);
    let best = search.best.map(|b| b.1).unwrap_or_default();
    let pairs = best
        .into_iter()
        .map(|(d, l)| MatchedPair {
            detection: d,
            label: l,
            iou: iou[d][l],
        })
        .collect();
    Ok(Matching::from_pairs(pairs, num_detections, num_labels))
}

struct Search<'a> {
    iou: &'a [Vec<f64>],
    tau: f64,
    num_labels: usize,
    used: Vec<bool>,
    current: Vec<(usize, usize)>,
    best: Option<(f64, Vec<(usize, usize)>)>,
}

impl Search<'_> {
    fn visit(&mut self, det: usize, total: f64) {
        if det == self.iou.len() {
            self.offer(total);
            return;
        }
        for l in 0..self.num_labels {
            let x = self.iou[det][l];
            if self.used[l] || x < self.tau {
                continue;
            }
            self.used[l] = true;
            self.current.push((det, l));
            self.visit(det + 1, total + x);
            self.current.pop();
            self.used[l] = false;
        }
        self.visit(det + 1, total);
    }

    fn offer(&mut self, total: f64) {
        let better = match &self.best {
            None => true,
            Some((best_total, best_pairs)) => {
                let (k, bk) = (self.current.len(), best_pairs.len());
                k > bk
                    || (k == bk && total > *best_total)
                    || (k == bk && total == *best_total && self.current < *best_pairs)
            }
        };
        if better {
            self.best = Some((total, self.current.clone()));
        }
    }
}
