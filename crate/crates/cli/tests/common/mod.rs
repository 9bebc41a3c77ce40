#![allow(dead_code)]

use std::path::{Path, PathBuf};

use areal_decomp::AdjacencyGraph;
use areal_decomp_cli::RunConfig;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Loads a bundled fixture config with its output redirected to `out`.
pub fn fixture_config(name: &str, out: &Path) -> RunConfig {
    let mut cfg = RunConfig::load(&fixture(name).join("config.toml")).unwrap();
    cfg.output = out.to_path_buf();
    cfg
}

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

pub fn dense(a: &areal_decomp::SparseSymmetric<f64>) -> DMatrix<f64> {
    let n = a.n();
    DMatrix::from_fn(n, n, |i, j| a.get(i, j))
}

pub fn edge_sum(g: &AdjacencyGraph, u: &[f64]) -> f64 {
    g.edges().iter().map(|&(i, j)| (u[i] - u[j]).powi(2)).sum()
}

/// `Σ_j (Σ_{i~j} x_i − 4 x_j)²` with the lattice padded by replicating its
/// border cells.
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

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov statistic of `x` against `cdf`.
pub fn ks_statistic(mut x: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at level `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// `(region_id, level, mean, prob_positive, class)`
pub type DetailRow = (String, usize, f64, f64, String);

pub fn read_details(path: &Path) -> Vec<DetailRow> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["region_id", "level", "mean", "prob_positive", "class"]
    );
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            (
                r[0].to_string(),
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
                r[3].parse().unwrap(),
                r[4].to_string(),
            )
        })
        .collect()
}

/// Writes an adjacency file and counts file for an irregular graph in
/// `dir`: a lattice with a few random diagonal links.
pub fn write_synthetic_dataset(dir: &Path, nrow: usize, ncol: usize, seed: u64) {
    let mut r = rng(seed);
    let n = nrow * ncol;
    let mut edges: Vec<(usize, usize)> = AdjacencyGraph::grid(nrow, ncol).unwrap().edges().to_vec();
    for k in 0..n {
        let (i, j) = (k / ncol, k % ncol);
        if i + 1 < nrow && j + 1 < ncol && r.random::<f64>() < 0.3 {
            edges.push((k, k + ncol + 1));
        }
    }
    let g = AdjacencyGraph::from_edges(n, edges).unwrap();
    let mut adj = format!("n={n}\n");
    for i in 0..n {
        let nb: Vec<String> = g.neighbors(i).iter().map(|j| j.to_string()).collect();
        adj.push_str(&format!("{i}: {}\n", nb.join(" ")));
    }
    let mut counts = String::from("region_id,y,e\n");
    for k in 0..n {
        let (i, j) = ((k / ncol) as f64, (k % ncol) as f64);
        let eta = 0.3 * (i / 4.0).sin() * (j / 6.0).cos() + 0.15 * r.random_range(-1.0..1.0);
        let e: f64 = r.random_range(5.0..80.0);
        let y = rand_distr::Distribution::sample(&rand_distr::Poisson::new(e * f64::exp(eta)).unwrap(), &mut r) as u64;
        counts.push_str(&format!("{:05},{y},{e:.4}\n", 1000 + k));
    }
    std::fs::create_dir_all(dir).unwrap();
    std::fs::write(dir.join("adjacency.txt"), adj).unwrap();
    std::fs::write(dir.join("counts.csv"), counts).unwrap();
}
