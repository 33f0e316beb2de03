//! Total-variation distance between a subcube-conditional sampler `P` and a
//! known distribution `Q`.
//!
//! `d_TV(P, Q) = E_{x~P}[max(0, 1 - Q(x)/P(x))]`. The outer loop draws
//! `alpha` points from `P`; for each, `P(x)` is estimated by the chain rule as
//! a product of `n` conditional marginals `P(x_i | x_1..x_{i-1})`, each
//! obtained with [`gbas_estimate`] under the prefix condition.
//!
//! Iteration `i` uses the stream `(seed, i)` for both its outer draw and its
//! marginal estimates, so a run is a pure function of the seed whatever the
//! thread count.

use serde::{Deserialize, Serialize};

use crate::cube::{BitString, ConditionalSampler, KnownDistribution, SubcubeCondition};
use crate::error::{Error, Result};
use crate::gbas::{default_max_draws, gbas_estimate, GbasResult};
use crate::rng::RngStream;

/// Above this dimension the mass estimate is formed in log space.
pub const LOG_SPACE_DIM: usize = 32;

/// Outer iterations dispatched per batch. Budget checks happen between
/// batches, so a fixed size keeps truncated runs reproducible.
pub const BATCH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub n: usize,
    pub zeta: f64,
    pub delta: f64,
    pub alpha: u64,
    pub gamma: f64,
    pub delta_prime: f64,
    pub k: u64,
}

/// `ceil((3n / gamma^2) ln(2n / delta'))`, or 0 when there are no
/// marginals to estimate.
pub fn marginal_sample_size(n: usize, gamma: f64, delta_prime: f64) -> Result<u64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} not in (0, 1)")));
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta' = {delta_prime} not in (0, 1)"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let n = n as f64;
    Ok((3.0 * n / (gamma * gamma) * (2.0 * n / delta_prime).ln()).ceil() as u64)
}

/// Parameters of one estimation run. `delta` may be 1 so that the tester can
/// pass `2 delta` for `delta = 1/2`.
pub fn derive_params(n: usize, zeta: f64, delta: f64) -> Result<EstimatorParams> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidParameter(format!("zeta = {zeta} not in (0, 1)")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} not in (0, 1]")));
    }
    let alpha = (2.0 / (zeta * zeta) * (4.0 / delta).ln()).ceil() as u64;
    let gamma = zeta / (1.11 * (2.0 + zeta));
    let delta_prime = delta / (2.0 * alpha as f64);
    let k = marginal_sample_size(n, gamma, delta_prime)?;
    Ok(EstimatorParams {
        n,
        zeta,
        delta,
        alpha,
        gamma,
        delta_prime,
        k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub p_hat_x: f64,
    pub marginals: Vec<GbasResult>,
    pub draws: u64,
}

/// Product of `values`, in log space for long products.
fn chain_product(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n > LOG_SPACE_DIM {
        values.map(f64::ln).sum::<f64>().exp()
    } else {
        values.product()
    }
}

/// Estimates `P(x)` as the product of the conditional marginals of `x`.
pub fn est_mass<S: ConditionalSampler + ?Sized>(
    sampler: &mut S,
    x: &BitString,
    k: u64,
    rng: &mut RngStream,
    max_draws: u64,
) -> Result<MassEstimate> {
    let n = sampler.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let mut marginals = Vec::with_capacity(n);
    for i in 0..n {
        let prefix = SubcubeCondition::prefix(x, i);
        marginals.push(gbas_estimate(sampler, &prefix, i, x.get(i), k, rng, max_draws)?);
    }
    Ok(MassEstimate {
        p_hat_x: chain_product(marginals.iter().map(|m| m.p_hat), n),
        draws: marginals.iter().map(|m| m.draws).sum(),
        marginals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub dtv_estimate: f64,
    /// Sampler calls, counting the outer draws.
    pub total_samples: u64,
    /// `max(0, 1 - Q(x)/P̂(x))` per outer draw, in iteration order.
    pub per_sample_terms: Vec<f64>,
    pub params: EstimatorParams,
    pub seed: u64,
}

impl EstimateReport {
    fn from_terms(terms: Vec<f64>, total_samples: u64, params: EstimatorParams, seed: u64) -> Self {
        let dtv_estimate = if terms.is_empty() {
            0.0
        } else {
            terms.iter().sum::<f64>() / terms.len() as f64
        };
        Self {
            dtv_estimate,
            total_samples,
            per_sample_terms: terms,
            params,
            seed,
        }
    }

    /// Whether every outer iteration ran.
    pub fn is_complete(&self) -> bool {
        self.per_sample_terms.len() as u64 == self.params.alpha
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EstimatorOptions {
    /// Cap on a single marginal estimate; defaults to
    /// [`default_max_draws`] of `k`.
    pub max_draws_per_marginal: Option<u64>,
    /// Cap on all sampler calls in the run.
    pub max_total_samples: Option<u64>,
}

struct Iteration {
    term: f64,
    samples: u64,
}

fn run_iteration<S, K>(
    sampler: &mut S,
    known: &K,
    params: &EstimatorParams,
    seed: u64,
    index: u64,
    max_draws: u64,
) -> Result<Iteration>
where
    S: ConditionalSampler + ?Sized,
    K: KnownDistribution + ?Sized,
{
    let mut rng = RngStream::new(seed, index);
    let x = sampler.draw(&SubcubeCondition::full(params.n), &mut rng);
    let est = est_mass(sampler, &x, params.k, &mut rng, max_draws)?;
    let q = known.mass(&x);
    Ok(Iteration {
        term: (1.0 - q / est.p_hat_x).max(0.0),
        samples: 1 + est.draws,
    })
}

#[cfg(feature = "parallel")]
fn run_batch<S, K>(
    sampler: &S,
    known: &K,
    params: &EstimatorParams,
    seed: u64,
    range: std::ops::Range<u64>,
    max_draws: u64,
) -> Vec<Result<Iteration>>
where
    S: ConditionalSampler + Clone + Send + Sync,
    K: KnownDistribution + Sync,
{
    use rayon::prelude::*;
    range
        .into_par_iter()
        .map_init(
            || sampler.clone(),
            |local, i| run_iteration(local, known, params, seed, i, max_draws),
        )
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_batch<S, K>(
    sampler: &S,
    known: &K,
    params: &EstimatorParams,
    seed: u64,
    range: std::ops::Range<u64>,
    max_draws: u64,
) -> Vec<Result<Iteration>>
where
    S: ConditionalSampler + Clone + Send + Sync,
    K: KnownDistribution + Sync,
{
    let mut local = sampler.clone();
    range
        .map(|i| run_iteration(&mut local, known, params, seed, i, max_draws))
        .collect()
}

pub fn cube_probe_est<S, K>(
    sampler: &S,
    known: &K,
    zeta: f64,
    delta: f64,
    seed: u64,
) -> Result<EstimateReport>
where
    S: ConditionalSampler + Clone + Send + Sync,
    K: KnownDistribution + Sync,
{
    let params = derive_params(sampler.dim(), zeta, delta)?;
    cube_probe_est_with(sampler, known, params, seed, &EstimatorOptions::default())
}

pub fn cube_probe_est_with<S, K>(
    sampler: &S,
    known: &K,
    params: EstimatorParams,
    seed: u64,
    options: &EstimatorOptions,
) -> Result<EstimateReport>
where
    S: ConditionalSampler + Clone + Send + Sync,
    K: KnownDistribution + Sync,
{
    if known.dim() != sampler.dim() {
        return Err(Error::DimensionMismatch {
            expected: sampler.dim(),
            found: known.dim(),
        });
    }
    if params.n != sampler.dim() {
        return Err(Error::DimensionMismatch {
            expected: sampler.dim(),
            found: params.n,
        });
    }
    let mut max_draws = options
        .max_draws_per_marginal
        .unwrap_or_else(|| default_max_draws(params.k));
    if let Some(limit) = options.max_total_samples {
        max_draws = max_draws.min(limit);
    }

    let mut terms = Vec::with_capacity(params.alpha as usize);
    let mut total = 0u64;
    let mut start = 0u64;
    while start < params.alpha {
        let end = (start + BATCH as u64).min(params.alpha);
        let batch = run_batch(sampler, known, &params, seed, start..end, max_draws);
        let done_before = terms.len();
        let mut batch_total = 0u64;
        for outcome in batch {
            match outcome {
                Ok(it) => {
                    terms.push(it.term);
                    batch_total += it.samples;
                }
                Err(Error::BudgetExhausted { draws, .. }) if options.max_total_samples.is_some() => {
                    terms.truncate(done_before);
                    return Err(Error::SampleBudget {
                        used: total + batch_total + draws,
                        limit: options.max_total_samples.unwrap(),
                        partial: Box::new(EstimateReport::from_terms(terms, total, params, seed)),
                    });
                }
                Err(e) => return Err(e),
            }
        }
        total += batch_total;
        if let Some(limit) = options.max_total_samples {
            if total > limit {
                terms.truncate(done_before);
                let used = total;
                total -= batch_total;
                return Err(Error::SampleBudget {
                    used,
                    limit,
                    partial: Box::new(EstimateReport::from_terms(terms, total, params, seed)),
                });
            }
        }
        start = end;
    }
    Ok(EstimateReport::from_terms(terms, total, params, seed))
}
