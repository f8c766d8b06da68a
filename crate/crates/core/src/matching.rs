//! Optimal assignment between zero multisets.

use crate::scalar::{Cx, CxExt, Real};

/// Minimum-cost assignment for a `rows × cols` cost matrix with `rows ≤ cols`
/// (Hungarian algorithm with potentials). Returns, for each row, its column.
pub fn assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "assignment needs rows ≤ cols");
    let inf = f64::INFINITY;
    // 1-based arrays; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

/// Result of comparing two zero collections.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchOutcome<T: Real> {
    pub matched: bool,
    /// Largest scaled pairing error `|a − b| / (1 + max(|a|, |b|))` over matched pairs.
    pub max_error: T,
    pub unmatched_left: Vec<Cx<T>>,
    pub unmatched_right: Vec<Cx<T>>,
}

fn scaled_dist<T: Real>(a: Cx<T>, b: Cx<T>) -> T {
    (a - b).norm() / (T::one() + a.norm().max(b.norm()))
}

/// Optimal pairing of `a` with a subset of `b` (`|a| ≤ |b|` after swapping);
/// returns `(i, j, scaled distance)` triples.
pub fn optimal_pairs<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<(usize, usize, T)> {
    let swap = a.len() > b.len();
    let (rows, cols) = if swap { (b, a) } else { (a, b) };
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&x| cols.iter().map(|&y| scaled_dist(x, y).to_f64_lossy()).collect())
        .collect();
    assignment(&cost)
        .into_iter()
        .enumerate()
        .map(|(i, j)| {
            let d = scaled_dist(rows[i], cols[j]);
            if swap {
                (j, i, d)
            } else {
                (i, j, d)
            }
        })
        .collect()
}

/// Multisets match when they have the same size and the optimal assignment
/// pairs every element within `tol·(1+|z|)`.
pub fn match_multisets<T: Real>(a: &[Cx<T>], b: &[Cx<T>], tol: T) -> MatchOutcome<T> {
    let pairs = optimal_pairs(a, b);
    let mut left_used = vec![false; a.len()];
    let mut right_used = vec![false; b.len()];
    let mut max_error = T::zero();
    for &(i, j, d) in &pairs {
        max_error = max_error.max(d);
        if d <= tol {
            left_used[i] = true;
            right_used[j] = true;
        }
    }
    let unmatched_left: Vec<_> = a.iter().zip(&left_used).filter(|(_, u)| !**u).map(|(z, _)| *z).collect();
    let unmatched_right: Vec<_> = b.iter().zip(&right_used).filter(|(_, u)| !**u).map(|(z, _)| *z).collect();
    MatchOutcome {
        matched: unmatched_left.is_empty() && unmatched_right.is_empty(),
        max_error,
        unmatched_left,
        unmatched_right,
    }
}

/// Set-level comparison: every element of each side lies within
/// `tol·(1+|z|)` of some element of the other side.
pub fn match_sets<T: Real>(a: &[Cx<T>], b: &[Cx<T>], tol: T) -> MatchOutcome<T> {
    let nearest = |x: Cx<T>, ys: &[Cx<T>]| ys.iter().map(|&y| scaled_dist(x, y)).fold(None, |acc: Option<T>, d| {
        Some(acc.map_or(d, |a| a.min(d)))
    });
    let mut max_error = T::zero();
    let mut unmatched_left = Vec::new();
    let mut unmatched_right = Vec::new();
    for &x in a {
        match nearest(x, b) {
            Some(d) if d <= tol => max_error = max_error.max(d),
            _ => unmatched_left.push(x),
        }
    }
    for &y in b {
        match nearest(y, a) {
            Some(d) if d <= tol => max_error = max_error.max(d),
            _ => unmatched_right.push(y),
        }
    }
    MatchOutcome {
        matched: unmatched_left.is_empty() && unmatched_right.is_empty(),
        max_error,
        unmatched_left,
        unmatched_right,
    }
}
