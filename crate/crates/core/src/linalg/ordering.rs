//! Node orderings that keep the envelope of the assembled forms small.

use std::collections::VecDeque;

/// Envelope size of the symmetric pattern `adj` under `perm` (new index ->
/// old index): the sum over rows of the distance to the first nonzero.
pub fn profile(adj: &[Vec<usize>], perm: &[usize]) -> usize {
    let mut rank = vec![0; perm.len()];
    for (r, &v) in perm.iter().enumerate() {
        rank[v] = r;
    }
    (0..perm.len())
        .map(|r| {
            let first = adj[perm[r]].iter().map(|&w| rank[w]).fold(r, usize::min);
            r - first
        })
        .sum()
}

/// Reverse Cuthill-McKee, one component at a time, each started from a
/// pseudo-peripheral vertex of minimum degree.
pub fn rcm(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| adj[v].len());
    for &s in &by_degree {
        if seen[s] {
            continue;
        }
        let start = peripheral(adj, s);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !seen[w]).collect();
            nb.sort_by_key(|&w| adj[w].len());
            for w in nb {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn levels(adj: &[Vec<usize>], s: usize) -> (usize, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    let mut last = s;
    while let Some(v) = queue.pop_front() {
        last = v;
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (dist[last], last)
}

fn peripheral(adj: &[Vec<usize>], s: usize) -> usize {
    let (mut ecc, mut v) = levels(adj, s);
    for _ in 0..8 {
        let (e, w) = levels(adj, v);
        if e <= ecc {
            break;
        }
        ecc = e;
        v = w;
    }
    v
}
