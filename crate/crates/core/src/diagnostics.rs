//! Single-chain convergence checks: acceptance rates, Geweke z-scores and
//! effective sample size.

use crate::error::{Error, Result};
use crate::sampler::{log_likelihood, CountData, PosteriorSamples};
use crate::scalar::Real;

pub const GEWEKE_MIN_LEN: usize = 100;
pub const ESS_MIN_LEN: usize = 10;
pub const GEWEKE_FIRST: f64 = 0.1;
pub const GEWEKE_LAST: f64 = 0.5;
/// Batches used for the batch-means spectral variance estimate.
pub const BATCH_COUNT: usize = 20;

/// Fractions of accepted η proposals.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceRates {
    pub overall: f64,
    pub per_site: Vec<f64>,
}

impl AcceptanceRates {
    /// `proposals` is the number of proposals made at each site. Zero
    /// proposals yields zero rates.
    pub fn from_counts(accepted: &[u64], proposals: u64) -> Self {
        if proposals == 0 || accepted.is_empty() {
            return Self {
                overall: 0.0,
                per_site: vec![0.0; accepted.len()],
            };
        }
        let per_site = accepted
            .iter()
            .map(|&a| a as f64 / proposals as f64)
            .collect();
        let total: u64 = accepted.iter().sum();
        Self {
            overall: total as f64 / (proposals as f64 * accepted.len() as f64),
            per_site,
        }
    }
}

pub fn acceptance_rate<T: Real>(samples: &PosteriorSamples<T>) -> AcceptanceRates {
    AcceptanceRates::from_counts(&samples.accepted, samples.sweeps)
}

/// Geweke statistic. `degenerate` marks a zero variance estimate, in which
/// case `z` is not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geweke<T> {
    pub z: T,
    pub degenerate: bool,
}

fn mean<T: Real>(x: &[T]) -> T {
    x.iter().copied().sum::<T>() / T::from_count(x.len())
}

/// Asymptotic variance of a segment by nonoverlapping batch means. Segments
/// shorter than the batch count fall back to batches of one.
fn batch_means_variance<T: Real>(x: &[T]) -> T {
    let batches = BATCH_COUNT.min(x.len());
    let size = x.len() / batches;
    let means: Vec<T> = x[..batches * size].chunks(size).map(mean).collect();
    let grand = mean(&means);
    let ss: T = means.iter().map(|&m| (m - grand) * (m - grand)).sum();
    T::from_count(size) * ss / T::from_count(batches - 1)
}

/// Compares the mean of the first `first_frac` of the trace with the mean of
/// the last `last_frac`.
pub fn geweke_z<T: Real>(trace: &[T], first_frac: f64, last_frac: f64) -> Result<Geweke<T>> {
    if trace.len() < GEWEKE_MIN_LEN {
        return Err(Error::SeriesTooShort {
            min: GEWEKE_MIN_LEN,
            len: trace.len(),
        });
    }
    assert!(
        first_frac > 0.0 && last_frac > 0.0 && first_frac + last_frac <= 1.0,
        "segment fractions must be positive and sum to at most 1"
    );
    let n = trace.len();
    let n_first = ((n as f64 * first_frac) as usize).max(2);
    let n_last = ((n as f64 * last_frac) as usize).max(2);
    let first = &trace[..n_first];
    let last = &trace[n - n_last..];
    let var = batch_means_variance(first) / T::from_count(n_first)
        + batch_means_variance(last) / T::from_count(n_last);
    if !(var > T::zero()) {
        return Ok(Geweke {
            z: T::nan(),
            degenerate: true,
        });
    }
    Ok(Geweke {
        z: (mean(first) - mean(last)) / var.sqrt(),
        degenerate: false,
    })
}

/// Effective sample size. A constant trace is flagged `degenerate` and
/// reported as `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ess<T> {
    pub value: T,
    pub degenerate: bool,
}

/// `N / (1 + 2 Σ ρ_k)`, with autocorrelations summed in consecutive pairs
/// until the first pair with non-positive sum. Clipped to `(0, N]`.
pub fn effective_sample_size<T: Real>(trace: &[T]) -> Result<Ess<T>> {
    let n = trace.len();
    if n < ESS_MIN_LEN {
        return Err(Error::SeriesTooShort {
            min: ESS_MIN_LEN,
            len: n,
        });
    }
    let total = T::from_count(n);
    let mu = mean(trace);
    let centered: Vec<T> = trace.iter().map(|&x| x - mu).collect();
    let autocov = |lag: usize| -> T {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(&a, &b)| a * b)
            .sum::<T>()
            / total
    };
    let gamma0 = autocov(0);
    if !(gamma0 > T::zero()) {
        return Ok(Ess {
            value: total,
            degenerate: true,
        });
    }

    let two = T::lit(2.0);
    let mut pair_sum_total = T::zero();
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / gamma0;
        if pair <= T::zero() {
            break;
        }
        pair_sum_total += pair;
        lag += 2;
    }
    let tau = two * pair_sum_total - T::one();
    let ess = if tau > T::zero() { total / tau } else { total };
    Ok(Ess {
        value: ess.min(total).max(T::min_positive_value()),
        degenerate: false,
    })
}

/// Diagnostics for one monitored scalar. Statistics are `None` when the
/// trace is too short for them.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorSummary<T> {
    pub name: String,
    pub geweke: Option<Geweke<T>>,
    pub ess: Option<Ess<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSummary<T> {
    pub acceptance: AcceptanceRates,
    pub monitors: Vec<MonitorSummary<T>>,
}

/// First, quartile and last indices, deduplicated.
pub fn sentinel_sites(n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let mut sites = vec![0, n / 4, n / 2, (3 * n) / 4, n - 1];
    sites.dedup();
    sites
}

/// κ_u, κ_v, the log-likelihood and η at the sentinel sites, one trace each.
pub fn monitored_traces<T: Real>(
    samples: &PosteriorSamples<T>,
    data: &CountData<T>,
) -> Result<Vec<(String, Vec<T>)>> {
    let states = &samples.states;
    let mut traces = vec![
        ("kappa_u".to_string(), states.iter().map(|s| s.kappa_u).collect()),
        ("kappa_v".to_string(), states.iter().map(|s| s.kappa_v).collect()),
        (
            "log_likelihood".to_string(),
            states
                .iter()
                .map(|s| log_likelihood(data, &s.eta()))
                .collect::<Result<Vec<T>>>()?,
        ),
    ];
    for site in sentinel_sites(samples.n) {
        traces.push((
            format!("eta[{site}]"),
            states.iter().map(|s| s.u[site] + s.v[site]).collect(),
        ));
    }
    Ok(traces)
}

pub fn summarize<T: Real>(samples: &PosteriorSamples<T>, data: &CountData<T>) -> Result<TraceSummary<T>> {
    let monitors = monitored_traces(samples, data)?
        .into_iter()
        .map(|(name, trace)| MonitorSummary {
            name,
            geweke: geweke_z(&trace, GEWEKE_FIRST, GEWEKE_LAST).ok(),
            ess: effective_sample_size(&trace).ok(),
        })
        .collect();
    Ok(TraceSummary {
        acceptance: acceptance_rate(samples),
        monitors,
    })
}
