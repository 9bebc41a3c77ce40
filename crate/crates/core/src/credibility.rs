//! Posterior summaries of decomposition details.

use std::fmt;

use crate::decompose::DetailSet;
use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Default credibility tail level.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Sign classification of one region at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Credibility {
    Negative,
    None,
    Positive,
}

impl Credibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Credibility::Negative => "neg",
            Credibility::None => "none",
            Credibility::Positive => "pos",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Credibility::Negative => Credibility::Positive,
            Credibility::None => Credibility::None,
            Credibility::Positive => Credibility::Negative,
        }
    }
}

impl fmt::Display for Credibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pointwise probability map for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap<T> {
    pub prob_positive: Vec<T>,
    pub classification: Vec<Credibility>,
    pub alpha: T,
}

fn level_values<T: Real>(details: &[DetailSet<T>], level: usize) -> Result<(usize, Vec<&[T]>)> {
    let first = details.first().ok_or(Error::EmptyCollection)?;
    let n = first.n();
    let mut out = Vec::with_capacity(details.len());
    for d in details {
        if level >= d.levels() {
            return Err(Error::LevelOutOfRange {
                level,
                levels: d.levels(),
            });
        }
        check_dim(n, d.z[level].len())?;
        out.push(d.z[level].as_slice());
    }
    Ok((n, out))
}

/// Elementwise average of `z_level` over the collection. `level` is
/// zero-based.
pub fn posterior_mean<T: Real>(details: &[DetailSet<T>], level: usize) -> Result<Vec<T>> {
    let (n, values) = level_values(details, level)?;
    let mut mean = vec![T::zero(); n];
    for z in &values {
        for (m, &v) in mean.iter_mut().zip(*z) {
            *m += v;
        }
    }
    let count = T::from_count(values.len());
    mean.iter_mut().for_each(|m| *m /= count);
    Ok(mean)
}

/// Fraction of samples with `z_{level,i} > 0`, classified positive when the
/// fraction is at least `1 − alpha` and negative when it is at most `alpha`.
/// Exact zeros count as not positive.
pub fn pointwise_probability_map<T: Real>(
    details: &[DetailSet<T>],
    level: usize,
    alpha: T,
) -> Result<ProbabilityMap<T>> {
    let half = T::lit(0.5);
    if !(alpha > T::zero() && alpha < half) {
        return Err(Error::InvalidAlpha(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    let (n, values) = level_values(details, level)?;
    let mut positive = vec![0usize; n];
    for z in &values {
        for (c, &v) in positive.iter_mut().zip(*z) {
            if v > T::zero() {
                *c += 1;
            }
        }
    }
    let total = T::from_count(values.len());
    let prob_positive: Vec<T> = positive.iter().map(|&c| T::from_count(c) / total).collect();
    let upper = T::one() - alpha;
    let classification = prob_positive
        .iter()
        .map(|&p| {
            if p >= upper {
                Credibility::Positive
            } else if p <= alpha {
                Credibility::Negative
            } else {
                Credibility::None
            }
        })
        .collect();
    Ok(ProbabilityMap {
        prob_positive,
        classification,
        alpha,
    })
}
