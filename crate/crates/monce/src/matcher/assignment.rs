//! Bipartite assignment used by the per-frame matcher.
//!
//! Finds a matching that is (1) maximum-cardinality and (2) of maximum
//! total weight among maximum-cardinality matchings, via successive
//! shortest augmenting paths. Augmenting along a cheapest path (edge cost
//! `-weight` forward, `+weight` when unwinding a matched edge) preserves
//! optimality of every intermediate matching, so stopping when no
//! augmenting path remains yields both properties at once.
//!
//! Paths are found with plain Bellman-Ford relaxation over the residual
//! graph. Costs stay as direct sums of a few weights — there are no
//! accumulated potentials — and all scan orders are fixed, so the result
//! is deterministic for identical inputs.

/// One feasible (left, right) pair with its weight.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

/// Maximum-cardinality, maximum-total-weight matching.
/// Returns matched `(left, right)` pairs sorted by left index.
pub fn solve(n_left: usize, n_right: usize, edges: &[Edge]) -> Vec<(usize, usize)> {
    // Adjacency with stable ordering: by left, then right.
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_left];
    for e in edges {
        adj[e.left].push((e.right, e.weight));
    }
    for nbrs in adj.iter_mut() {
        nbrs.sort_by_key(|&(right, _)| right);
    }

    let mut left_match: Vec<Option<usize>> = vec![None; n_left];
    let mut right_match: Vec<Option<usize>> = vec![None; n_right];

    loop {
        // Shortest augmenting path from any free left node to any free
        // right node. dist_* hold path costs; parents record the tree.
        let mut dist_left = vec![f64::INFINITY; n_left];
        let mut dist_right = vec![f64::INFINITY; n_right];
        // For a right node: the left node whose forward edge reached it.
        let mut via_left: Vec<usize> = vec![usize::MAX; n_right];
        for (i, m) in left_match.iter().enumerate() {
            if m.is_none() {
                dist_left[i] = 0.0;
            }
        }

        let max_rounds = n_left + n_right + 2;
        for _ in 0..max_rounds {
            let mut changed = false;
            for i in 0..n_left {
                if !dist_left[i].is_finite() {
                    continue;
                }
                for &(j, w) in &adj[i] {
                    if left_match[i] == Some(j) {
                        continue; // matched edges are traversed right-to-left
                    }
                    let cand = dist_left[i] - w;
                    if cand < dist_right[j] {
                        dist_right[j] = cand;
                        via_left[j] = i;
                        changed = true;
                    }
                }
            }
            for j in 0..n_right {
                if !dist_right[j].is_finite() {
                    continue;
                }
                if let Some(i) = right_match[j] {
                    let w = adj[i]
                        .iter()
                        .find(|&&(r, _)| r == j)
                        .map(|&(_, w)| w)
                        .unwrap_or(0.0);
                    let cand = dist_right[j] + w;
                    if cand < dist_left[i] {
                        dist_left[i] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        // Cheapest reachable free right node; ties break to the smallest
        // index so the outcome does not depend on map iteration order.
        let mut end: Option<usize> = None;
        for j in 0..n_right {
            if right_match[j].is_none()
                && dist_right[j].is_finite()
                && end.is_none_or(|e| dist_right[j] < dist_right[e])
            {
                end = Some(j);
            }
        }
        let Some(mut j) = end else { break };

        // Flip matched/unmatched status along the path.
        loop {
            let i = via_left[j];
            let prev = left_match[i];
            left_match[i] = Some(j);
            right_match[j] = Some(i);
            match prev {
                Some(pj) => j = pj,
                None => break,
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = left_match
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (i, j)))
        .collect();
    pairs.sort();
    pairs
}
