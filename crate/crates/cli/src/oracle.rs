//! Dense cross-checks of the sparse linear algebra, enabled by the
//! `dense_oracle` config flag. Only practical for small problems.

use anyhow::{bail, Result};
use areal_decomp::{BymSampler, ChainState, Decomposer, SparseSymmetric};
use nalgebra::{DMatrix, DVector};

pub const MAX_DENSE_N: usize = 3000;
/// Largest tolerated error relative to the magnitude of the oracle.
pub const TOLERANCE: f64 = 1e-8;

fn dense(a: &SparseSymmetric<f64>) -> DMatrix<f64> {
    let n = a.n();
    let mut m = DMatrix::zeros(n, n);
    for (i, j, v) in a.triplets() {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

fn dense_solve(a: &SparseSymmetric<f64>, b: &[f64]) -> Result<Vec<f64>> {
    if a.n() > MAX_DENSE_N {
        bail!("dense oracle limited to {MAX_DENSE_N} regions, got {}", a.n());
    }
    match dense(a).cholesky() {
        Some(c) => Ok(c.solve(&DVector::from_column_slice(b)).iter().copied().collect()),
        None => bail!("dense oracle: matrix is not positive definite"),
    }
}

fn compare(sparse: &[f64], dense: &[f64]) -> Result<f64> {
    let scale = dense.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let err = sparse
        .iter()
        .zip(dense)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if err > TOLERANCE * scale {
        bail!("dense oracle mismatch: max abs error {err:e}");
    }
    Ok(err)
}

/// Conditional mean of the structured effect at `state`, sparse vs dense.
pub fn check_u_conditional(sampler: &BymSampler<f64>, state: &ChainState<f64>) -> Result<f64> {
    let (_, mean) = sampler.u_conditional(state)?;
    let a = sampler
        .precision()
        .scale_add_identity(state.kappa_u, state.kappa_v);
    let rhs: Vec<f64> = state.eta().iter().map(|x| state.kappa_v * x).collect();
    compare(&mean, &dense_solve(&a, &rhs)?)
}

/// Every finite-scale smooth of `x`, sparse vs dense.
pub fn check_smooths(dec: &Decomposer<f64>, r: &SparseSymmetric<f64>, x: &[f64]) -> Result<f64> {
    let smooths = dec.smooths(x)?;
    let mut worst = 0.0f64;
    for (&lambda, s) in dec.scales().lambdas().iter().zip(&smooths) {
        let oracle = dense_solve(&r.scale_add_identity(lambda, 1.0), x)?;
        worst = worst.max(compare(s, &oracle)?);
    }
    Ok(worst)
}
