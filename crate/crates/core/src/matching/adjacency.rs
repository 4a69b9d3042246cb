use serde::Serialize;

use crate::error::MatchError;
use crate::geometry::{iou_matrix, Box2D};

/// Largest square dimension accepted. Beyond this the gap between a k-pair
/// and a (k-1)-pair assignment, 1/(2n^2), approaches f64 round-off in sums.
pub const MAX_DIMENSION: usize = 10_000;

/// Zero-completed, thresholded and scaled IoU matrix.
///
/// Rows are detections and columns labels; rows/columns past
/// `num_detections`/`num_labels` are the zero completion. A candidate pair
/// with IoU `x >= tau` gets weight `(x + n) / (2 n^2)`, so every nonzero entry
/// lies in `[1/(2n), 1/(2n) + 1/(2n^2)]`: any assignment with more pairs
/// outweighs every assignment with fewer, and at equal size the larger total
/// IoU wins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledAdjacency {
    pub n: usize,
    pub tau: f64,
    pub num_detections: usize,
    pub num_labels: usize,
    pub entries: Vec<Vec<f64>>,
    pub raw_iou: Vec<Vec<f64>>,
}

pub(crate) fn check_tau(tau: f64) -> Result<(), MatchError> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(MatchError::InvalidTau(tau))
    }
}

/// Scaled weight for a candidate pair in an `n`-dimensional problem.
pub fn scaled_entry(iou: f64, n: usize) -> f64 {
    let n = n as f64;
    (iou + n) / (2.0 * n * n)
}

pub fn build_adjacency(
    detections: &[Box2D],
    labels: &[Box2D],
    tau: f64,
) -> Result<ScaledAdjacency, MatchError> {
    ScaledAdjacency::from_iou(
        &iou_matrix(detections, labels),
        detections.len(),
        labels.len(),
        tau,
    )
}

impl ScaledAdjacency {
    /// Builds the matrix from a precomputed `num_detections x num_labels`
    /// IoU table.
    pub fn from_iou(
        iou: &[Vec<f64>],
        num_detections: usize,
        num_labels: usize,
        tau: f64,
    ) -> Result<Self, MatchError> {
        check_tau(tau)?;
        let n = num_detections.max(num_labels);
        if n == 0 {
            return Err(MatchError::EmptyProblem);
        }
        if n > MAX_DIMENSION {
            return Err(MatchError::TooLarge {
                n,
                limit: MAX_DIMENSION,
            });
        }
        debug_assert_eq!(iou.len(), num_detections);

        let mut raw_iou = vec![vec![0.0; n]; n];
        let mut entries = vec![vec![0.0; n]; n];
        for (i, row) in iou.iter().enumerate() {
            debug_assert_eq!(row.len(), num_labels);
            for (j, &x) in row.iter().enumerate() {
                raw_iou[i][j] = x;
                if x >= tau {
                    entries[i][j] = scaled_entry(x, n);
                }
            }
        }
        Ok(Self {
            n,
            tau,
            num_detections,
            num_labels,
            entries,
            raw_iou,
        })
    }

    pub fn lower_bound(&self) -> f64 {
        1.0 / (2.0 * self.n as f64)
    }

    pub fn upper_bound(&self) -> f64 {
        let n = self.n as f64;
        (1.0 + n) / (2.0 * n * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn greedy_trap_iou() -> Vec<Vec<f64>> {
        vec![vec![0.56, 0.72], vec![0.3, 0.56]]
    }

    #[test]
    fn reproduces_printed_entries() {
        let adj = ScaledAdjacency::from_iou(&greedy_trap_iou(), 2, 2, 0.5).unwrap();
        assert!((adj.entries[0][0] - 0.32).abs() < 1e-12);
        assert!((adj.entries[0][1] - 0.34).abs() < 1e-12);
        assert_eq!(adj.entries[1][0], 0.0);
        assert!((adj.entries[1][1] - 0.32).abs() < 1e-12);
        assert_eq!(adj.raw_iou[1][0], 0.3);
    }

    #[test]
    fn below_threshold_is_zero_for_any_n() {
        for n in 1..6 {
            let iou = vec![vec![0.49; n]; n];
            let adj = ScaledAdjacency::from_iou(&iou, n, n, 0.5).unwrap();
            assert!(adj.entries.iter().flatten().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn completion_rows_and_columns_are_zero() {
        let iou = vec![vec![0.9, 0.8, 0.7]];
        let adj = ScaledAdjacency::from_iou(&iou, 1, 3, 0.5).unwrap();
        assert_eq!(adj.n, 3);
        assert!(adj.entries[1..].iter().flatten().all(|&e| e == 0.0));
        assert!((adj.entries[0][2] - (0.7 + 3.0) / 18.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_and_bad_tau() {
        assert_eq!(build_adjacency(&[], &[], 0.5), Err(MatchError::EmptyProblem));
        let b = Box2D::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(build_adjacency(&[b], &[b], 0.0), Err(MatchError::InvalidTau(0.0)));
        assert_eq!(build_adjacency(&[b], &[b], 1.5), Err(MatchError::InvalidTau(1.5)));
        assert!(build_adjacency(&[b], &[b], 1.0).is_ok());
    }

    #[test]
    fn entry_bounds_hold() {
        for n in 1..50 {
            let lo = scaled_entry(0.0, n);
            let hi = scaled_entry(1.0, n);
            assert!((lo - 1.0 / (2.0 * n as f64)).abs() < 1e-15);
            let nf = n as f64;
            assert!((hi - (1.0 / (2.0 * nf) + 1.0 / (2.0 * nf * nf))).abs() < 1e-15);
        }
    }
}
