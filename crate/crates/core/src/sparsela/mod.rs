//! Sparse symmetric linear algebra: lower-triangle storage, a fill-reducing
//! Cholesky factorization, solves and Gaussian draws given a precision.

mod cholesky;
mod matrix;
mod ordering;

pub use cholesky::{cholesky, CholeskyFactor, Ordering, SymbolicCholesky};
pub use matrix::SparseSymmetric;
pub use ordering::minimum_degree;
