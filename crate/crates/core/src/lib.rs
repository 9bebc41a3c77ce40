//! Bayesian multiresolution decomposition of areal count data.
//!
//! The pipeline resamples a latent log relative risk field with a
//! Gibbs/Metropolis–Hastings sampler for a Poisson model with an intrinsic
//! GMRF spatial term ([`sampler`]), splits every sampled log-rate field into
//! scale-dependent details with the penalty smoother `(I + λR)⁻¹`
//! ([`decompose`]), and summarizes the details with posterior means and
//! pointwise probability maps ([`credibility`]).
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar for the common cases.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod credibility;
pub mod decompose;
pub mod diagnostics;
mod error;
pub mod graph;
pub mod io;
pub mod sampler;
mod scalar;
pub mod sparsela;

pub use credibility::{pointwise_probability_map, posterior_mean, Credibility, ProbabilityMap};
pub use decompose::{
    decompose_samples, details, log_field, smooth, smooth_infinity, Decomposer, DetailSet, ScaleSet,
};
pub use diagnostics::{
    acceptance_rate, effective_sample_size, geweke_z, summarize, AcceptanceRates, TraceSummary,
};
pub use error::{Error, Result};
pub use graph::{
    igmrf1_precision, igmrf2_grid_precision, read_adjacency, AdjacencyGraph, Components,
};
pub use sampler::{
    log_likelihood, reconstruct_field, run_chain, BymSampler, ChainState, CountData, Hyperparams,
    PosteriorSamples,
};
pub use scalar::{dot, max_abs, Real};
pub use sparsela::{cholesky, CholeskyFactor, Ordering, SparseSymmetric, SymbolicCholesky};

pub type SparseSymmetricF64 = SparseSymmetric<f64>;
pub type CholeskyFactorF64 = CholeskyFactor<f64>;
pub type CountDataF64 = CountData<f64>;
pub type HyperparamsF64 = Hyperparams<f64>;
pub type ChainStateF64 = ChainState<f64>;
pub type PosteriorSamplesF64 = PosteriorSamples<f64>;
pub type ScaleSetF64 = ScaleSet<f64>;
pub type DetailSetF64 = DetailSet<f64>;
pub type ProbabilityMapF64 = ProbabilityMap<f64>;

pub type SparseSymmetricF32 = SparseSymmetric<f32>;
pub type CholeskyFactorF32 = CholeskyFactor<f32>;
pub type CountDataF32 = CountData<f32>;
pub type HyperparamsF32 = Hyperparams<f32>;
pub type ChainStateF32 = ChainState<f32>;
pub type PosteriorSamplesF32 = PosteriorSamples<f32>;
pub type ScaleSetF32 = ScaleSet<f32>;
pub type DetailSetF32 = DetailSet<f32>;
pub type ProbabilityMapF32 = ProbabilityMap<f32>;
