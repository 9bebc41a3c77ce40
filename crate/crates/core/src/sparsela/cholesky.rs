use std::sync::Arc;

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

use super::{minimum_degree, SparseSymmetric};

const NONE: usize = usize::MAX;

/// Fill-reducing ordering used by the symbolic analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ordering {
    #[default]
    MinimumDegree,
    Natural,
}

/// Ordering, elimination tree and column structure of `L` for one sparsity
/// pattern. Matrices sharing the pattern (for instance `κ_u R + κ_v I` for
/// varying precisions) reuse the analysis.
#[derive(Debug, Clone)]
pub struct SymbolicCholesky {
    n: usize,
    /// `perm[k]` is the original index at permuted position `k`.
    perm: Vec<usize>,
    pinv: Vec<usize>,
    parent: Vec<usize>,
    /// Upper triangle of `P A Pᵀ` in compressed columns, rows sorted.
    c_ptr: Vec<usize>,
    c_row: Vec<usize>,
    l_ptr: Vec<usize>,
}

impl SymbolicCholesky {
    pub fn analyze<T: Real>(a: &SparseSymmetric<T>, ordering: Ordering) -> Arc<Self> {
        let n = a.n();
        let perm = match ordering {
            Ordering::MinimumDegree => minimum_degree(a),
            Ordering::Natural => (0..n).collect(),
        };
        let mut pinv = vec![0; n];
        for (k, &i) in perm.iter().enumerate() {
            pinv[i] = k;
        }

        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (pinv[i], pinv[j]);
            cols[pi.max(pj)].push(pi.min(pj));
        }
        // every pivot needs a diagonal slot even when A stores none there
        for (k, col) in cols.iter_mut().enumerate() {
            col.push(k);
            col.sort_unstable();
            col.dedup();
        }
        let mut c_ptr = Vec::with_capacity(n + 1);
        c_ptr.push(0);
        let mut c_row = Vec::new();
        for col in &cols {
            c_row.extend_from_slice(col);
            c_ptr.push(c_row.len());
        }

        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            for &row in &c_row[c_ptr[k]..c_ptr[k + 1]] {
                let mut i = row;
                while i != NONE && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == NONE {
                        parent[i] = k;
                    }
                    i = next;
                }
            }
        }

        let mut symbolic = Self {
            n,
            perm,
            pinv,
            parent,
            c_ptr,
            c_row,
            l_ptr: Vec::new(),
        };

        let mut counts = vec![1usize; n];
        let mut work = ReachWork::new(n);
        for k in 0..n {
            let top = symbolic.ereach(k, &mut work);
            for &i in &work.stack[top..] {
                counts[i] += 1;
            }
        }
        let mut l_ptr = Vec::with_capacity(n + 1);
        l_ptr.push(0);
        for c in counts {
            l_ptr.push(l_ptr.last().unwrap() + c);
        }
        symbolic.l_ptr = l_ptr;
        Arc::new(symbolic)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Stored entries of `L`, diagonal included.
    pub fn factor_nnz(&self) -> usize {
        self.l_ptr[self.n]
    }

    /// Nonzero pattern of row `k` of `L` (excluding the diagonal) in
    /// topological order, left in `work.stack[top..]`.
    fn ereach(&self, k: usize, work: &mut ReachWork) -> usize {
        let mut top = self.n;
        work.mark[k] = k;
        for &row in &self.c_row[self.c_ptr[k]..self.c_ptr[k + 1]] {
            let mut i = row;
            work.path.clear();
            while work.mark[i] != k {
                work.path.push(i);
                work.mark[i] = k;
                i = self.parent[i];
            }
            while let Some(i) = work.path.pop() {
                top -= 1;
                work.stack[top] = i;
            }
        }
        top
    }

    /// Numeric factorization of a matrix whose pattern is contained in the
    /// analyzed one.
    pub fn factor<T: Real>(self: &Arc<Self>, a: &SparseSymmetric<T>) -> Result<CholeskyFactor<T>> {
        let n = self.n;
        check_dim(n, a.n())?;

        let mut c_val = vec![T::zero(); self.c_row.len()];
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (self.pinv[i], self.pinv[j]);
            let (row, col) = (pi.min(pj), pi.max(pj));
            let range = self.c_ptr[col]..self.c_ptr[col + 1];
            let p = self.c_row[range.clone()]
                .binary_search(&row)
                .map_err(|_| Error::PatternMismatch { row: i, col: j })?;
            c_val[range.start + p] += v;
        }

        let nnz = self.factor_nnz();
        let mut l_row = vec![0usize; nnz];
        let mut l_val = vec![T::zero(); nnz];
        let mut next: Vec<usize> = self.l_ptr[..n].to_vec();
        let mut x = vec![T::zero(); n];
        let mut work = ReachWork::new(n);

        for k in 0..n {
            let top = self.ereach(k, &mut work);
            for p in self.c_ptr[k]..self.c_ptr[k + 1] {
                x[self.c_row[p]] = c_val[p];
            }
            let mut d = x[k];
            x[k] = T::zero();
            for &i in &work.stack[top..] {
                let lki = x[i] / l_val[self.l_ptr[i]];
                x[i] = T::zero();
                for p in self.l_ptr[i] + 1..next[i] {
                    x[l_row[p]] -= l_val[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                l_row[p] = k;
                l_val[p] = lki;
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: self.perm[k] });
            }
            let p = next[k];
            next[k] += 1;
            l_row[p] = k;
            l_val[p] = d.sqrt();
        }

        Ok(CholeskyFactor {
            symbolic: Arc::clone(self),
            l_row,
            l_val,
        })
    }
}

struct ReachWork {
    mark: Vec<usize>,
    stack: Vec<usize>,
    path: Vec<usize>,
}

impl ReachWork {
    fn new(n: usize) -> Self {
        Self {
            mark: vec![NONE; n],
            stack: vec![0; n],
            path: Vec::new(),
        }
    }
}

/// `P A Pᵀ = L Lᵀ` for a symmetric positive definite `A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor<T> {
    symbolic: Arc<SymbolicCholesky>,
    l_row: Vec<usize>,
    l_val: Vec<T>,
}

/// Factorizes `a` with the default minimum-degree ordering.
pub fn cholesky<T: Real>(a: &SparseSymmetric<T>) -> Result<CholeskyFactor<T>> {
    SymbolicCholesky::analyze(a, Ordering::default()).factor(a)
}

impl<T: Real> CholeskyFactor<T> {
    pub fn n(&self) -> usize {
        self.symbolic.n
    }

    pub fn symbolic(&self) -> &Arc<SymbolicCholesky> {
        &self.symbolic
    }

    pub fn permutation(&self) -> &[usize] {
        &self.symbolic.perm
    }

    /// Refactorizes a matrix with the same pattern, reusing the analysis.
    pub fn refactor(&self, a: &SparseSymmetric<T>) -> Result<Self> {
        self.symbolic.factor(a)
    }

    /// Entries of `L` as `(row, col, value)` in permuted coordinates.
    pub fn factor_entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let ptr = &self.symbolic.l_ptr;
        (0..self.n()).flat_map(move |j| {
            (ptr[j]..ptr[j + 1]).map(move |p| (self.l_row[p], j, self.l_val[p]))
        })
    }

    fn diag(&self, j: usize) -> T {
        self.l_val[self.symbolic.l_ptr[j]]
    }

    fn below_diag(&self, j: usize) -> std::ops::Range<usize> {
        self.symbolic.l_ptr[j] + 1..self.symbolic.l_ptr[j + 1]
    }

    fn forward(&self, y: &mut [T]) {
        for j in 0..self.n() {
            y[j] /= self.diag(j);
            let yj = y[j];
            for p in self.below_diag(j) {
                y[self.l_row[p]] -= self.l_val[p] * yj;
            }
        }
    }

    fn backward(&self, y: &mut [T]) {
        for j in (0..self.n()).rev() {
            let mut s = y[j];
            for p in self.below_diag(j) {
                s -= self.l_val[p] * y[self.l_row[p]];
            }
            y[j] = s / self.diag(j);
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        check_dim(self.n(), b.len())?;
        let perm = &self.symbolic.perm;
        let mut y: Vec<T> = perm.iter().map(|&i| b[i]).collect();
        self.forward(&mut y);
        self.backward(&mut y);
        let mut x = vec![T::zero(); self.n()];
        for (k, &i) in perm.iter().enumerate() {
            x[i] = y[k];
        }
        Ok(x)
    }

    /// Draws from `N(mean, A⁻¹)`: `mean + Pᵀ L⁻ᵀ z` with `z` standard normal,
    /// drawn in permuted order.
    pub fn sample_gaussian<R: Rng + ?Sized>(&self, mean: &[T], rng: &mut R) -> Result<Vec<T>> {
        check_dim(self.n(), mean.len())?;
        let mut w: Vec<T> = (0..self.n()).map(|_| T::standard_normal(rng)).collect();
        self.backward(&mut w);
        let mut x = mean.to_vec();
        for (k, &i) in self.symbolic.perm.iter().enumerate() {
            x[i] += w[k];
        }
        Ok(x)
    }

    /// `log det A`.
    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.n()).map(|j| two * self.diag(j).ln()).sum()
    }
}
