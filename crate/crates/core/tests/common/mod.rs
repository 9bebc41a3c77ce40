#![allow(dead_code)]

use areal_decomp::{AdjacencyGraph, SparseSymmetric};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph; with `connected`, a random spanning tree is added first.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64, connected: bool) -> AdjacencyGraph {
    let mut edges = Vec::new();
    if connected {
        for i in 1..n {
            edges.push((rng.random_range(0..i), i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    AdjacencyGraph::from_edges(n, edges).unwrap()
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn dense(a: &SparseSymmetric<f64>) -> DMatrix<f64> {
    let n = a.n();
    DMatrix::from_fn(n, n, |i, j| a.get(i, j))
}

/// Random sparse symmetric positive definite matrix: a weighted graph
/// Laplacian plus a positive diagonal.
pub fn random_spd(rng: &mut impl Rng, n: usize, p: f64) -> SparseSymmetric<f64> {
    let mut triplets = Vec::new();
    for i in 0..n {
        triplets.push((i, i, rng.random_range(0.5..2.0)));
        for j in 0..i {
            if rng.random::<f64>() < p {
                let w = rng.random_range(0.1..1.0);
                triplets.push((i, j, -w));
                triplets.push((i, i, w));
                triplets.push((j, j, w));
            }
        }
    }
    SparseSymmetric::from_triplets(n, triplets).unwrap()
}

pub fn dense_solve(a: &SparseSymmetric<f64>, b: &[f64]) -> Vec<f64> {
    dense(a)
        .lu()
        .solve(&DVector::from_column_slice(b))
        .expect("nonsingular")
        .iter()
        .copied()
        .collect()
}

pub fn eigenvalues(a: &SparseSymmetric<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = dense(a).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// `Σ_{i~j} (u_i − u_j)²` straight from the edge list.
pub fn edge_sum(g: &AdjacencyGraph, u: &[f64]) -> f64 {
    g.edges().iter().map(|&(i, j)| (u[i] - u[j]).powi(2)).sum()
}

/// `Σ_j (Σ_{i~j} x_i − 4 x_j)²` on a grid padded by one cell that replicates
/// the nearest interior value.
pub fn grid_second_order_sum(nrow: usize, ncol: usize, x: &[f64]) -> f64 {
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, nrow as isize - 1) as usize;
        let c = c.clamp(0, ncol as isize - 1) as usize;
        x[r * ncol + c]
    };
    let mut total = 0.0;
    for r in 0..nrow as isize {
        for c in 0..ncol as isize {
            let s = at(r - 1, c) + at(r + 1, c) + at(r, c - 1) + at(r, c + 1) - 4.0 * at(r, c);
            total += s * s;
        }
    }
    total
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}
