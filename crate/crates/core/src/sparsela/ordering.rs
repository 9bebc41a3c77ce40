use std::collections::BTreeSet;

use crate::scalar::Real;

use super::SparseSymmetric;

/// Minimum-degree elimination order of the sparsity graph of `a`.
///
/// Returns `perm` with `perm[k]` the original index eliminated at step `k`.
/// Ties go to the smallest index, so the result is deterministic.
pub fn minimum_degree<T: Real>(a: &SparseSymmetric<T>) -> Vec<usize> {
    let n = a.n();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (adj[i].len(), i)).collect();
    let mut perm = Vec::with_capacity(n);

    while let Some((_, node)) = queue.pop_first() {
        perm.push(node);
        let clique: Vec<usize> = std::mem::take(&mut adj[node]).into_iter().collect();
        for &p in &clique {
            queue.remove(&(adj[p].len(), p));
            adj[p].remove(&node);
        }
        for (k, &p) in clique.iter().enumerate() {
            for &q in &clique[k + 1..] {
                adj[p].insert(q);
                adj[q].insert(p);
            }
        }
        for &p in &clique {
            queue.insert((adj[p].len(), p));
        }
    }
    perm
}
