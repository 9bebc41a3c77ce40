//! Poisson log-linear model with a structured plus unstructured log relative
//! risk, `η = u + v`:
//!
//! ```text
//! y_i | η_i        ~ Poisson(e_i exp(η_i))
//! u | κ_u          ∝ κ_u^{(n-k)/2} exp(-κ_u/2 uᵀRu),  Σ_{i∈c} u_i = 0 per component c
//! v | κ_v          ~ N(0, κ_v⁻¹ I)
//! κ_u, κ_v         ~ Gamma(a, b)   (shape, rate)
//! ```
//!
//! One sweep updates, in order: η per site by random-walk Metropolis–Hastings
//! (u held fixed, so v moves), u by an exact Gaussian draw given η, then the
//! two precisions from their conjugate Gamma conditionals.
//!
//! Because `R 1_c = 0` for each component indicator, `(κ_u R + κ_v I)⁻¹ 1_c`
//! is proportional to `1_c`, so removing the component means from the
//! unconstrained draw of u is exactly the draw conditioned on the sum-to-zero
//! constraint.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::graph::{igmrf1_precision, AdjacencyGraph, Components};
use crate::scalar::{dot, Real};
use crate::sparsela::{CholeskyFactor, Ordering, SparseSymmetric, SymbolicCholesky};

/// Observed and expected counts per region.
#[derive(Debug, Clone, PartialEq)]
pub struct CountData<T> {
    y: Vec<u64>,
    e: Vec<T>,
}

impl<T: Real> CountData<T> {
    pub fn new(y: Vec<u64>, e: Vec<T>) -> Result<Self> {
        check_dim(y.len(), e.len())?;
        if let Some(i) = e.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "expected count at index {i} must be positive and finite, got {}",
                e[i]
            )));
        }
        Ok(Self { y, e })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[u64] {
        &self.y
    }

    pub fn e(&self) -> &[T] {
        &self.e
    }

    fn y_real(&self, i: usize) -> T {
        T::from_u64(self.y[i]).expect("count fits in float")
    }
}

/// Prior parameters, proposal scale and chain layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams<T> {
    pub a_u: T,
    pub b_u: T,
    pub a_v: T,
    pub b_v: T,
    pub proposal_sd: T,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
}

impl<T: Real> Default for Hyperparams<T> {
    fn default() -> Self {
        Self {
            a_u: T::lit(1.0),
            b_u: T::lit(0.5),
            a_v: T::lit(1.0),
            b_v: T::lit(0.01),
            proposal_sd: T::lit(0.3),
            iterations: 110_000,
            burn_in: 10_000,
            thinning: 10,
            seed: 0,
        }
    }
}

impl<T: Real> Hyperparams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a_u", self.a_u),
            ("b_u", self.b_u),
            ("a_v", self.a_v),
            ("b_v", self.b_v),
            ("proposal_sd", self.proposal_sd),
        ];
        for (name, value) in positive {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(Error::InvalidHyperparams(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.iterations == 0 {
            return Err(Error::InvalidHyperparams("iterations must be positive".into()));
        }
        if self.burn_in > self.iterations {
            return Err(Error::InvalidHyperparams(format!(
                "burn_in ({}) exceeds iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidHyperparams("thinning must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of states a chain keeps: `⌊(iterations − burn_in) / thinning⌋`.
    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thinning
    }
}

/// One state of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub kappa_u: T,
    pub kappa_v: T,
}

impl<T: Real> ChainState<T> {
    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn eta(&self) -> Vec<T> {
        self.u.iter().zip(&self.v).map(|(&a, &b)| a + b).collect()
    }
}

/// Retained states plus the bookkeeping needed to diagnose the run.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples<T> {
    pub n: usize,
    pub hyperparams: Hyperparams<T>,
    pub states: Vec<ChainState<T>>,
    /// Accepted η proposals per site over all sweeps, burn-in included.
    pub accepted: Vec<u64>,
    /// Number of sweeps run, i.e. proposals made per site.
    pub sweeps: u64,
}

/// `Σ_i y_i η_i − e_i exp(η_i)`, without the `log y_i!` constant.
pub fn log_likelihood<T: Real>(data: &CountData<T>, eta: &[T]) -> Result<T> {
    check_dim(data.n(), eta.len())?;
    if let Some(i) = eta.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok((0..data.n())
        .map(|i| data.y_real(i) * eta[i] - data.e[i] * eta[i].exp())
        .sum())
}

/// Poisson rates `e_i exp(u_i + v_i)`.
pub fn reconstruct_field<T: Real>(data: &CountData<T>, state: &ChainState<T>) -> Result<Vec<T>> {
    check_dim(data.n(), state.u.len())?;
    check_dim(data.n(), state.v.len())?;
    Ok((0..data.n())
        .map(|i| data.e[i] * (state.u[i] + state.v[i]).exp())
        .collect())
}

/// Log of the per-site conditional target of `η_i` given `u_i` and `κ_v`.
pub fn site_log_target<T: Real>(y: T, e: T, u: T, kappa_v: T, eta: T) -> T {
    let d = eta - u;
    y * eta - e * eta.exp() - kappa_v * d * d / T::lit(2.0)
}

/// Metropolis–Hastings log acceptance ratio for moving site `η` to `proposal`.
pub fn mh_log_ratio<T: Real>(y: T, e: T, u: T, kappa_v: T, eta: T, proposal: T) -> T {
    site_log_target(y, e, u, kappa_v, proposal) - site_log_target(y, e, u, kappa_v, eta)
}

/// Gibbs/Metropolis sampler bound to one dataset and adjacency structure.
#[derive(Debug, Clone)]
pub struct BymSampler<T> {
    data: CountData<T>,
    r: SparseSymmetric<T>,
    components: Components,
    symbolic: Arc<SymbolicCholesky>,
    hyper: Hyperparams<T>,
}

impl<T: Real> BymSampler<T> {
    pub fn new(data: CountData<T>, graph: &AdjacencyGraph, hyper: Hyperparams<T>) -> Result<Self> {
        check_dim(data.n(), graph.n())?;
        hyper.validate()?;
        let r = igmrf1_precision(graph);
        let symbolic = SymbolicCholesky::analyze(
            &r.scale_add_identity(T::one(), T::one()),
            Ordering::MinimumDegree,
        );
        Ok(Self {
            data,
            r,
            components: graph.connected_components(),
            symbolic,
            hyper,
        })
    }

    pub fn data(&self) -> &CountData<T> {
        &self.data
    }

    pub fn precision(&self) -> &SparseSymmetric<T> {
        &self.r
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn hyperparams(&self) -> &Hyperparams<T> {
        &self.hyper
    }

    /// `η_i = log((y_i + 0.5) / e_i)`, `u` the per-component centered `η`,
    /// `v = η − u`, both precisions 10.
    pub fn initial_state(&self) -> ChainState<T> {
        let half = T::lit(0.5);
        let eta: Vec<T> = (0..self.data.n())
            .map(|i| ((self.data.y_real(i) + half) / self.data.e[i]).ln())
            .collect();
        let mut u = eta.clone();
        self.components.center(&mut u);
        let v = eta.iter().zip(&u).map(|(&a, &b)| a - b).collect();
        ChainState {
            u,
            v,
            kappa_u: T::lit(10.0),
            kappa_v: T::lit(10.0),
        }
    }

    /// Draws `κ_u ~ Gamma(a_u + (n − k)/2, b_u + uᵀRu/2)`, `k` the number of
    /// connected components.
    pub fn step_kappa_u<R: Rng + ?Sized>(&self, state: &mut ChainState<T>, rng: &mut R) -> T {
        let two = T::lit(2.0);
        let rank = T::from_count(self.data.n() - self.components.count());
        let shape = self.hyper.a_u + rank / two;
        let rate = self.hyper.b_u
            + self.r.quad_form(&state.u).expect("state matches graph") / two;
        state.kappa_u = T::sample_gamma(shape, rate, rng);
        state.kappa_u
    }

    /// Draws `κ_v ~ Gamma(a_v + n/2, b_v + vᵀv/2)`.
    pub fn step_kappa_v<R: Rng + ?Sized>(&self, state: &mut ChainState<T>, rng: &mut R) -> T {
        let two = T::lit(2.0);
        let shape = self.hyper.a_v + T::from_count(self.data.n()) / two;
        let rate = self.hyper.b_v + dot(&state.v, &state.v) / two;
        state.kappa_v = T::sample_gamma(shape, rate, rng);
        state.kappa_v
    }

    /// Factor of `A = κ_u R + κ_v I` and the conditional mean `A⁻¹ κ_v η`.
    pub fn u_conditional(&self, state: &ChainState<T>) -> Result<(CholeskyFactor<T>, Vec<T>)> {
        let a = self.r.scale_add_identity(state.kappa_u, state.kappa_v);
        let factor = self.symbolic.factor(&a)?;
        let rhs: Vec<T> = state.eta().into_iter().map(|x| state.kappa_v * x).collect();
        let mean = factor.solve(&rhs)?;
        Ok((factor, mean))
    }

    /// Unconstrained draw from `N(A⁻¹ κ_v η, A⁻¹)`.
    pub fn draw_u_unconstrained<R: Rng + ?Sized>(
        &self,
        state: &ChainState<T>,
        rng: &mut R,
    ) -> Result<Vec<T>> {
        let (factor, mean) = self.u_conditional(state)?;
        factor.sample_gaussian(&mean, rng)
    }

    /// Gibbs update of `u` given `η`, recentered per component; `v` is reset
    /// to `η − u` so `η` is unchanged.
    pub fn step_u<R: Rng + ?Sized>(&self, state: &mut ChainState<T>, rng: &mut R) -> Result<()> {
        let eta = state.eta();
        let mut u = self.draw_u_unconstrained(state, rng)?;
        self.components.center(&mut u);
        state.v = eta.iter().zip(&u).map(|(&a, &b)| a - b).collect();
        state.u = u;
        Ok(())
    }

    /// Site-by-site random-walk Metropolis–Hastings on `η` with `u` fixed.
    /// Accepted moves land in `v`. Writes one acceptance flag per site.
    #[allow(clippy::needless_range_loop)]
    pub fn step_eta<R: Rng + ?Sized>(
        &self,
        state: &mut ChainState<T>,
        rng: &mut R,
        accepted: &mut [bool],
    ) {
        for i in 0..self.data.n() {
            let u = state.u[i];
            let eta = u + state.v[i];
            let proposal = eta + self.hyper.proposal_sd * T::standard_normal(rng);
            let log_ratio = mh_log_ratio(
                self.data.y_real(i),
                self.data.e[i],
                u,
                state.kappa_v,
                eta,
                proposal,
            );
            let log_uniform = T::open01(rng).ln();
            accepted[i] = log_uniform < log_ratio;
            if accepted[i] {
                state.v[i] = proposal - u;
            }
        }
    }

    /// One full sweep in the order η, u, κ_u, κ_v.
    pub fn sweep<R: Rng + ?Sized>(
        &self,
        state: &mut ChainState<T>,
        rng: &mut R,
        accepted: &mut [bool],
    ) -> Result<()> {
        self.step_eta(state, rng, accepted);
        self.step_u(state, rng)?;
        self.step_kappa_u(state, rng);
        self.step_kappa_v(state, rng);
        Ok(())
    }

    /// Runs the chain from [`initial_state`](Self::initial_state) with the
    /// configured seed.
    pub fn run(&self) -> Result<PosteriorSamples<T>> {
        let h = &self.hyper;
        let n = self.data.n();
        let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
        let mut state = self.initial_state();
        let mut flags = vec![false; n];
        let mut accepted = vec![0u64; n];
        let mut states = Vec::with_capacity(h.retained());

        for iter in 0..h.iterations {
            self.sweep(&mut state, &mut rng, &mut flags)?;
            for (count, &flag) in accepted.iter_mut().zip(&flags) {
                *count += u64::from(flag);
            }
            if iter >= h.burn_in && (iter - h.burn_in + 1).is_multiple_of(h.thinning) {
                states.push(state.clone());
            }
        }

        Ok(PosteriorSamples {
            n,
            hyperparams: h.clone(),
            states,
            accepted,
            sweeps: h.iterations as u64,
        })
    }
}

/// Convenience wrapper: build a [`BymSampler`] and run it.
pub fn run_chain<T: Real>(
    data: &CountData<T>,
    graph: &AdjacencyGraph,
    hyper: &Hyperparams<T>,
) -> Result<PosteriorSamples<T>> {
    BymSampler::new(data.clone(), graph, hyper.clone())?.run()
}
