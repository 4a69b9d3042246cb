//! Dense maximum-weight assignment via shortest augmenting paths with
//! dual potentials (Kuhn-Munkres), O(n^3).

/// Returns `assignment` with `assignment[row] = column`, maximizing the sum
/// of `weights[row][assignment[row]]` over all permutations.
///
/// `weights` must be square with finite entries.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(weights.iter().all(|row| row.len() == n));

    // Minimize the negated weights. Index 0 is a virtual row/column; real
    // rows and columns are 1-based below.
    let cost = |i: usize, j: usize| -weights[i - 1][j - 1];

    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);

        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[col_owner[j] - 1] = j - 1;
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if prefix.len() == used.len() {
                out.push(prefix.clone());
                return;
            }
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    prefix.push(j);
                    go(prefix, used, out);
                    prefix.pop();
                    used[j] = false;
                }
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    fn total(w: &[Vec<f64>], a: &[usize]) -> f64 {
        a.iter().enumerate().map(|(i, &j)| w[i][j]).sum()
    }

    #[test]
    fn trivial_sizes() {
        assert!(max_weight_assignment(&[]).is_empty());
        assert_eq!(max_weight_assignment(&[vec![0.3]]), vec![0]);
    }

    #[test]
    fn picks_anti_diagonal_when_heavier() {
        let w = vec![vec![1.0, 5.0], vec![5.0, 1.0]];
        assert_eq!(max_weight_assignment(&w), vec![1, 0]);
    }

    #[test]
    fn all_zero_matrix_is_a_permutation() {
        let a = max_weight_assignment(&vec![vec![0.0; 5]; 5]);
        let mut seen = a.clone();
        seen.sort();
        assert_eq!(seen, (0..5).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn matches_permutation_enumeration(
            n in 1usize..=6,
            raw in prop::collection::vec(0.0f64..1.0, 36),
        ) {
            let w: Vec<Vec<f64>> = (0..n).map(|i| raw[i * 6..i * 6 + n].to_vec()).collect();
            let got = max_weight_assignment(&w);
            let best = permutations(n)
                .iter()
                .map(|p| total(&w, p))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((total(&w, &got) - best).abs() < 1e-12);
        }
    }
}
