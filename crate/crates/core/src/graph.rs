//! Region adjacency and the intrinsic GMRF precision matrices built on it.
//!
//! The adjacency text format is one region per line:
//!
//! ```text
//! # comment
//! n=3
//! 0: 1
//! 1: 0 2
//! 2: 1
//! ```
//!
//! Indices are 0-based. The optional `n=<count>` header must be the first
//! non-comment line; without it the dimension is `max index + 1`. One-sided
//! listings are closed symmetrically unless strict mode is requested.

use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparsela::SparseSymmetric;

/// Undirected neighbor relation between `n` regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    n: usize,
    /// Sorted, unique pairs with `i < j`.
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl AdjacencyGraph {
    /// Builds a graph from unordered pairs. Pairs may be given in either
    /// orientation and repeated; they are normalized and deduplicated.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges,
            neighbors,
            labels: None,
        })
    }

    /// Four-neighbor lattice with row-major indexing `r * ncol + c`.
    pub fn grid(nrow: usize, ncol: usize) -> Result<Self> {
        if nrow == 0 || ncol == 0 {
            return Err(Error::EmptyGrid { nrow, ncol });
        }
        let mut edges = Vec::with_capacity(2 * nrow * ncol);
        for r in 0..nrow {
            for c in 0..ncol {
                let k = r * ncol + c;
                if c + 1 < ncol {
                    edges.push((k, k + 1));
                }
                if r + 1 < nrow {
                    edges.push((k, k + ncol));
                }
            }
        }
        Self::from_edges(nrow * ncol, edges)
    }

    /// Attaches region identifiers. They must be unique and one per region.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        crate::error::check_dim(self.n, labels.len())?;
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateRegion(label.clone()));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Component label per region. Labels are numbered in order of each
    /// component's smallest member.
    pub fn connected_components(&self) -> Components {
        const UNSEEN: usize = usize::MAX;
        let mut label = vec![UNSEEN; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != UNSEEN {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for &j in &self.neighbors[i] {
                    if label[j] == UNSEEN {
                        label[j] = count;
                        stack.push(j);
                    }
                }
            }
            count += 1;
        }
        Components { label, count }
    }
}

/// Connected-component labelling of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    label: Vec<usize>,
    count: usize,
}

impl Components {
    /// Wraps raw labels. Labels must be dense in `0..k`.
    pub fn from_labels(label: Vec<usize>) -> Self {
        let count = label.iter().map(|&l| l + 1).max().unwrap_or(0);
        Self { label, count }
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    /// Number of members of each component.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.label {
            sizes[l] += 1;
        }
        sizes
    }

    /// Per-component means of `x`.
    pub fn means<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut sums = vec![T::zero(); self.count];
        for (&l, &v) in self.label.iter().zip(x) {
            sums[l] += v;
        }
        for (s, size) in sums.iter_mut().zip(self.sizes()) {
            *s /= T::from_count(size);
        }
        sums
    }

    /// Subtracts each component's mean in place and returns the removed means.
    pub fn center<T: Real>(&self, x: &mut [T]) -> Vec<T> {
        let means = self.means(x);
        for (v, &l) in x.iter_mut().zip(&self.label) {
            *v -= means[l];
        }
        means
    }
}

/// Parses the adjacency text format. With `strict`, a neighbor listed on one
/// side only is an error instead of being closed symmetrically.
pub fn read_adjacency<R: BufRead>(source: R, strict: bool) -> Result<AdjacencyGraph> {
    let mut declared_n: Option<usize> = None;
    let mut rows: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut seen_rows = HashSet::new();
    let mut first_content = true;

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        if let Some(rest) = text.strip_prefix("n=") {
            if !first_content {
                return Err(parse_err("header `n=` must be the first line".into()));
            }
            let n = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("invalid region count `{}`", rest.trim())))?;
            declared_n = Some(n);
            first_content = false;
            continue;
        }
        first_content = false;

        let (head, tail) = text
            .split_once(':')
            .ok_or_else(|| parse_err("expected `<index>: <neighbors>`".into()))?;
        let index: usize = head
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("invalid region index `{}`", head.trim())))?;
        if !seen_rows.insert(index) {
            return Err(Error::DuplicateRegion(index.to_string()));
        }
        let neighbors = tail
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| parse_err(format!("invalid neighbor index `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((lineno, index, neighbors));
    }

    let n = match declared_n {
        Some(n) => n,
        None => rows
            .iter()
            .flat_map(|(_, i, nb)| std::iter::once(*i).chain(nb.iter().copied()))
            .max()
            .map_or(0, |m| m + 1),
    };

    let mut directed = HashSet::new();
    for (lineno, i, nb) in &rows {
        for &index in std::iter::once(i).chain(nb) {
            if index >= n {
                return Err(Error::Parse {
                    line: *lineno,
                    message: Error::IndexOutOfRange { index, n }.to_string(),
                });
            }
        }
        for &j in nb {
            if j == *i {
                return Err(Error::SelfLoop(j));
            }
            directed.insert((*i, j));
        }
    }

    if strict {
        let mut missing: Vec<_> = directed
            .iter()
            .filter(|&&(i, j)| !directed.contains(&(j, i)))
            .collect();
        missing.sort_unstable();
        if let Some(&&(i, j)) = missing.first() {
            return Err(Error::Asymmetric { i, j });
        }
    }

    AdjacencyGraph::from_edges(n, directed)
}

/// First-order IGMRF precision: the matrix of `Σ_{i~j} (u_i - u_j)²`.
/// Diagonal holds the degree, each edge contributes `-1`.
pub fn igmrf1_precision<T: Real>(g: &AdjacencyGraph) -> SparseSymmetric<T> {
    let mut triplets = Vec::with_capacity(g.n() + g.edges().len());
    for i in 0..g.n() {
        triplets.push((i, i, T::from_count(g.degree(i))));
    }
    for &(i, j) in g.edges() {
        triplets.push((j, i, -T::one()));
    }
    SparseSymmetric::from_triplets(g.n(), triplets).expect("indices bounded by graph size")
}

/// Second-order precision on an `nrow x ncol` grid (row-major), the matrix of
/// `Σ_j (Σ_{i~j} x_i - 4 x_j)²` where cells outside the grid take the value
/// of the nearest grid cell.
///
/// Under that extension every missing neighbor of `j` contributes `x_j`, so
/// the inner sum is `-(L x)_j` with `L` the lattice Laplacian and `Q = L L`.
pub fn igmrf2_grid_precision<T: Real>(nrow: usize, ncol: usize) -> Result<SparseSymmetric<T>> {
    let g = AdjacencyGraph::grid(nrow, ncol)?;
    let n = g.n();
    let mut triplets = Vec::with_capacity(13 * n);
    let mut row: Vec<(usize, T)> = Vec::with_capacity(5);
    for j in 0..n {
        row.clear();
        row.push((j, -T::from_count(g.degree(j))));
        row.extend(g.neighbors(j).iter().map(|&i| (i, T::one())));
        for &(a, va) in &row {
            for &(b, vb) in &row {
                if a >= b {
                    triplets.push((a, b, va * vb));
                }
            }
        }
    }
    SparseSymmetric::from_triplets(n, triplets)
}
