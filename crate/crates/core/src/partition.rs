//! Heavy-tailed subgroup sizes under an exact fixed-sum constraint.
//!
//! Group sizes are drawn from a truncated power law `P[X = x] ∝ x^-α` and
//! accumulated greedily until the population is exhausted; the leftover
//! (smaller than the minimum size) is spread one unit at a time over
//! uniformly chosen groups that are still below the maximum size.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated discrete power law over `support_min..=support_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec {
    pub exponent: f64,
    pub support_min: usize,
    pub support_max: usize,
}

impl PowerLawSpec {
    /// The group-size law: exponent 3 over `{3, …, n}`.
    pub fn group_sizes(n: usize) -> Self {
        Self {
            exponent: 3.0,
            support_min: 3,
            support_max: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.support_min > self.support_max {
            return Err(Error::InvalidSpec(format!(
                "empty support {}..={}",
                self.support_min, self.support_max
            )));
        }
        if self.support_min < 1 {
            return Err(Error::InvalidSpec("support must start at 1 or above".into()));
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "exponent {} must be positive",
                self.exponent
            )));
        }
        Ok(())
    }
}

/// Probability table over a contiguous integer support starting at `support_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePmf {
    pub support_min: usize,
    pub probabilities: Vec<f64>,
}

impl DiscretePmf {
    /// Builds a table from non-negative weights, normalising them to sum to one.
    pub fn from_weights(support_min: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpec("empty support".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSpec("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidSpec("weights sum to zero".into()));
        }
        Ok(Self {
            support_min,
            probabilities: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn support_max(&self) -> usize {
        self.support_min + self.probabilities.len() - 1
    }

    /// `P[X = x]`, zero outside the support.
    pub fn prob(&self, x: usize) -> f64 {
        if x < self.support_min {
            return 0.0;
        }
        self.probabilities
            .get(x - self.support_min)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probabilities.is_empty() {
            return Err(Error::InvalidSpec("empty support".into()));
        }
        if self
            .probabilities
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(Error::InvalidSpec("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn sampler(&self) -> Result<PmfSampler> {
        self.validate()?;
        let index = WeightedIndex::new(&self.probabilities)
            .map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Ok(PmfSampler {
            support_min: self.support_min,
            index,
        })
    }
}

/// Draws values from a [`DiscretePmf`].
#[derive(Debug, Clone)]
pub struct PmfSampler {
    support_min: usize,
    index: WeightedIndex<f64>,
}

impl PmfSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.support_min + self.index.sample(rng)
    }
}

/// Sizes `S_1..S_k` summing exactly to `total`, with proportions `S_i / total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSequence {
    pub sizes: Vec<usize>,
    pub proportions: Vec<f64>,
    pub total: usize,
}

impl SizeSequence {
    pub fn from_sizes(sizes: Vec<usize>) -> Self {
        let total: usize = sizes.iter().sum();
        let proportions = sizes.iter().map(|&s| s as f64 / total as f64).collect();
        Self {
            sizes,
            proportions,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }
}

/// Normalised power-law table, computed by direct summation over the support.
pub fn power_law_pmf(spec: &PowerLawSpec) -> Result<DiscretePmf> {
    spec.validate()?;
    let weights = (spec.support_min..=spec.support_max)
        .map(|x| (x as f64).powf(-spec.exponent))
        .collect();
    DiscretePmf::from_weights(spec.support_min, weights)
}

/// Greedy realizations of `pmf` adjusted to sum to exactly `total`.
///
/// Draws are accepted while the remaining budget is at least the minimum of
/// the support; a draw larger than the budget is discarded. The final
/// remainder is added one unit at a time to a uniformly chosen element that
/// is still strictly below the support maximum.
pub fn fixed_sum_realizations<R: Rng + ?Sized>(
    pmf: &DiscretePmf,
    total: usize,
    rng: &mut R,
) -> Result<SizeSequence> {
    let min = pmf.support_min;
    let max = pmf.support_max();
    if total < min {
        return Err(Error::TooSmall { total, min });
    }
    let sampler = pmf.sampler()?;

    // cumulative[b] = P[X <= min + b]; used to detect budgets no draw can fit.
    let cumulative: Vec<f64> = pmf
        .probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    let mut sizes = Vec::new();
    let mut budget = total;
    while budget >= min {
        let reachable = cumulative[(budget - min).min(cumulative.len() - 1)];
        if reachable <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "no value of the support fits the remaining budget {budget}"
            )));
        }
        let x = sampler.sample(rng);
        if x <= budget {
            sizes.push(x);
            budget -= x;
        }
    }

    for _ in 0..budget {
        let open: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] < max).collect();
        if open.is_empty() {
            return Err(Error::Saturated {
                remainder: budget,
                max,
            });
        }
        let pick = open[rng.random_range(0..open.len())];
        sizes[pick] += 1;
    }

    Ok(SizeSequence::from_sizes(sizes))
}

/// Heavy-tailed subgroup sizes for a population of `n`.
pub fn sample_group_sizes<R: Rng + ?Sized>(
    n: usize,
    spec: &PowerLawSpec,
    rng: &mut R,
) -> Result<SizeSequence> {
    let pmf = power_law_pmf(spec)?;
    fixed_sum_realizations(&pmf, n, rng)
}
