//! Multiresolution decomposition with the penalty smoother
//! `S_λ = (I + λR)⁻¹`.
//!
//! For scales `0 = λ_1 < … < λ_{L−1}` and the implicit `λ_L = ∞`, a field
//! splits into details `z_l = S_{λ_l} x − S_{λ_{l+1}} x` for `l < L` and the
//! mean field `z_L = S_∞ x`, which sum back to `x`.

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::graph::Components;
use crate::sampler::{ChainState, CountData, PosteriorSamples};
use crate::scalar::Real;
use crate::sparsela::{CholeskyFactor, Ordering, SparseSymmetric, SymbolicCholesky};

/// Finite smoothing parameters, starting at exactly zero and strictly
/// increasing. The terminal infinite scale is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSet<T> {
    lambdas: Vec<T>,
}

impl<T: Real> ScaleSet<T> {
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        match lambdas.first() {
            None => return Err(Error::InvalidScales("at least one scale is required".into())),
            Some(&first) if first != T::zero() => {
                return Err(Error::InvalidScales(format!("first scale must be 0, got {first}")))
            }
            _ => {}
        }
        if let Some(bad) = lambdas.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidScales(format!("scale {bad} is not finite")));
        }
        if let Some(w) = lambdas.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidScales(format!(
                "scales must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    /// Number of levels `L`, the finite scales plus the mean field.
    pub fn levels(&self) -> usize {
        self.lambdas.len() + 1
    }
}

/// Details `z_1 … z_L` of one field.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailSet<T> {
    pub z: Vec<Vec<T>>,
    pub scales: ScaleSet<T>,
}

impl<T: Real> DetailSet<T> {
    pub fn levels(&self) -> usize {
        self.z.len()
    }

    pub fn n(&self) -> usize {
        self.z.first().map_or(0, Vec::len)
    }

    /// `Σ_l z_l`.
    pub fn sum(&self) -> Vec<T> {
        let mut total = vec![T::zero(); self.n()];
        for level in &self.z {
            for (t, &v) in total.iter_mut().zip(level) {
                *t += v;
            }
        }
        total
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda >= T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidScales(format!(
            "smoothing parameter must be finite and non-negative, got {lambda}"
        )))
    }
}

/// `(I + λR)⁻¹ x`. `λ = 0` returns `x` unchanged.
pub fn smooth<T: Real>(x: &[T], lambda: T, r: &SparseSymmetric<T>) -> Result<Vec<T>> {
    check_dim(r.n(), x.len())?;
    check_lambda(lambda)?;
    if lambda == T::zero() {
        return Ok(x.to_vec());
    }
    crate::sparsela::cholesky(&r.scale_add_identity(lambda, T::one()))?.solve(x)
}

/// Per-component mean of `x`, broadcast back over each component.
pub fn smooth_infinity<T: Real>(x: &[T], components: &Components) -> Result<Vec<T>> {
    check_dim(components.len(), x.len())?;
    let means = components.means(x);
    Ok(components.labels().iter().map(|&l| means[l]).collect())
}

/// Smoother bank for one precision and scale set. Each `I + λR` is factorized
/// once and reused for every field.
#[derive(Debug, Clone)]
pub struct Decomposer<T> {
    scales: ScaleSet<T>,
    components: Components,
    /// One entry per finite scale; `None` for `λ = 0`.
    factors: Vec<Option<CholeskyFactor<T>>>,
}

impl<T: Real> Decomposer<T> {
    pub fn new(r: &SparseSymmetric<T>, components: Components, scales: ScaleSet<T>) -> Result<Self> {
        check_dim(r.n(), components.len())?;
        let symbolic =
            SymbolicCholesky::analyze(&r.scale_add_identity(T::one(), T::one()), Ordering::MinimumDegree);
        let factors = scales
            .lambdas()
            .iter()
            .map(|&lambda| {
                if lambda == T::zero() {
                    Ok(None)
                } else {
                    symbolic.factor(&r.scale_add_identity(lambda, T::one())).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            scales,
            components,
            factors,
        })
    }

    pub fn scales(&self) -> &ScaleSet<T> {
        &self.scales
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// All `L` smooths `S_{λ_1} x, …, S_{λ_{L−1}} x, S_∞ x`.
    pub fn smooths(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        check_dim(self.n(), x.len())?;
        let mut out = Vec::with_capacity(self.scales.levels());
        for factor in &self.factors {
            out.push(match factor {
                None => x.to_vec(),
                Some(f) => f.solve(x)?,
            });
        }
        out.push(smooth_infinity(x, &self.components)?);
        Ok(out)
    }

    pub fn details(&self, x: &[T]) -> Result<DetailSet<T>> {
        let smooths = self.smooths(x)?;
        let mut z: Vec<Vec<T>> = smooths
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(&a, &b)| a - b).collect())
            .collect();
        z.push(smooths.last().expect("at least two smooths").clone());
        Ok(DetailSet {
            z,
            scales: self.scales.clone(),
        })
    }

    /// Decomposes `log(e) + u + v` of every retained state. Output order
    /// follows the sample order.
    pub fn decompose_samples(
        &self,
        samples: &PosteriorSamples<T>,
        data: &CountData<T>,
    ) -> Result<Vec<DetailSet<T>>> {
        check_dim(self.n(), data.n())?;
        check_dim(self.n(), samples.n)?;
        samples
            .states
            .par_iter()
            .map(|state| self.details(&log_field(data, state)?))
            .collect()
    }
}

/// `log(e_i) + u_i + v_i`, the logarithm of the reconstructed rates.
pub fn log_field<T: Real>(data: &CountData<T>, state: &ChainState<T>) -> Result<Vec<T>> {
    check_dim(data.n(), state.u.len())?;
    check_dim(data.n(), state.v.len())?;
    Ok((0..data.n())
        .map(|i| data.e()[i].ln() + state.u[i] + state.v[i])
        .collect())
}

/// Decomposes a single field.
pub fn details<T: Real>(
    x: &[T],
    scales: &ScaleSet<T>,
    r: &SparseSymmetric<T>,
    components: &Components,
) -> Result<DetailSet<T>> {
    Decomposer::new(r, components.clone(), scales.clone())?.details(x)
}

/// Decomposes every retained posterior state, sharing one factor per scale.
pub fn decompose_samples<T: Real>(
    samples: &PosteriorSamples<T>,
    data: &CountData<T>,
    scales: &ScaleSet<T>,
    r: &SparseSymmetric<T>,
    components: &Components,
) -> Result<Vec<DetailSet<T>>> {
    Decomposer::new(r, components.clone(), scales.clone())?.decompose_samples(samples, data)
}
