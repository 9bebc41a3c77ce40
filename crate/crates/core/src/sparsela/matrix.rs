use std::collections::BTreeMap;

use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Symmetric matrix stored as its lower triangle in compressed columns.
///
/// Within each column rows are strictly increasing, so a stored diagonal
/// entry is always the first one of its column. Exact zeros are dropped on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric<T> {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseSymmetric<T> {
    /// Assembles from `(row, col, value)` triplets. Either triangle may be
    /// used; `(i, j)` and `(j, i)` address the same entry and duplicates are
    /// summed.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (i, j, v) in triplets {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            // keyed (col, row) so iteration is column-major
            *acc.entry((i.min(j), i.max(j))).or_insert_with(T::zero) += v;
        }
        let mut col_ptr = vec![0; n + 1];
        let mut row_idx = Vec::with_capacity(acc.len());
        let mut values = Vec::with_capacity(acc.len());
        for ((col, row), v) in acc {
            if v == T::zero() {
                continue;
            }
            col_ptr[col + 1] += 1;
            row_idx.push(row);
            values.push(v);
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        Ok(Self {
            n,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal_matrix(&vec![T::one(); n])
    }

    pub fn diagonal_matrix(d: &[T]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal indices in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored lower-triangle entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of stored column `j` (rows `>= j`).
    pub fn column(&self, j: usize) -> (&[usize], &[T]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    /// Stored entries as `(row, col, value)` with `row >= col`, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |j| {
            let (rows, vals) = self.column(j);
            rows.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (row, col) = (i.max(j), i.min(j));
        let (rows, vals) = self.column(col);
        rows.binary_search(&row).map_or(T::zero(), |p| vals[p])
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `alpha * self + beta * I`.
    pub fn scale_add_identity(&self, alpha: T, beta: T) -> Self {
        let scaled = self.triplets().map(|(i, j, v)| (i, j, alpha * v));
        let ridge = (0..self.n).map(|i| (i, i, beta));
        Self::from_triplets(self.n, scaled.chain(ridge)).expect("same dimension")
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.n, x.len())?;
        let mut y = vec![T::zero(); self.n];
        for (i, j, v) in self.triplets() {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        Ok(y)
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[T]) -> Result<T> {
        check_dim(self.n, x.len())?;
        let two = T::lit(2.0);
        Ok(self
            .triplets()
            .map(|(i, j, v)| {
                if i == j {
                    v * x[i] * x[i]
                } else {
                    two * v * x[i] * x[j]
                }
            })
            .sum())
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n]; self.n];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
            d[j][i] = v;
        }
        d
    }
}
