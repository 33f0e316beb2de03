//! Accept/reject identity tester on top of the distance estimator.
//!
//! Estimates the distance to within `(eta - epsilon) / 2` at confidence
//! `2 delta` and rejects when the estimate exceeds the midpoint
//! `(eta + epsilon) / 2`. An estimate exactly at the midpoint accepts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cube::{ConditionalSampler, KnownDistribution};
use crate::error::{Error, Result};
use crate::estimator::{cube_probe_est_with, derive_params, EstimateReport, EstimatorOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TesterParams {
    pub epsilon: f64,
    pub eta: f64,
    pub delta: f64,
    pub zeta: f64,
    pub delta_t: f64,
    pub threshold_k: f64,
}

impl TesterParams {
    pub fn new(epsilon: f64, eta: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < eta && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < epsilon < eta <= 1, got epsilon = {epsilon}, eta = {eta}"
            )));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::InvalidParameter(format!("delta = {delta} not in (0, 1/2]")));
        }
        Ok(Self {
            epsilon,
            eta,
            delta,
            zeta: (eta - epsilon) / 2.0,
            delta_t: 2.0 * delta,
            threshold_k: (eta + epsilon) / 2.0,
        })
    }

    pub fn decide(&self, dtv_estimate: f64) -> Decision {
        if dtv_estimate > self.threshold_k {
            Decision::Reject
        } else {
            Decision::Accept
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    #[serde(rename = "A")]
    Accept,
    #[serde(rename = "R")]
    Reject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Accept => "ACCEPT",
            Decision::Reject => "REJECT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub estimate: EstimateReport,
    pub params: TesterParams,
}

impl Verdict {
    /// Recomputes the decision from the stored estimate.
    pub fn redecide(&self) -> Decision {
        self.params.decide(self.estimate.dtv_estimate)
    }
}

pub fn cube_probe_tester<S, K>(
    sampler: &S,
    known: &K,
    epsilon: f64,
    eta: f64,
    delta: f64,
    seed: u64,
) -> Result<Verdict>
where
    S: ConditionalSampler + Clone + Send + Sync,
    K: KnownDistribution + Sync,
{
    cube_probe_tester_with(sampler, known, epsilon, eta, delta, seed, &EstimatorOptions::default())
}

pub fn cube_probe_tester_with<S, K>(
    sampler: &S,
    known: &K,
    epsilon: f64,
    eta: f64,
    delta: f64,
    seed: u64,
    options: &EstimatorOptions,
) -> Result<Verdict>
where
    S: ConditionalSampler + Clone + Send + Sync,
    K: KnownDistribution + Sync,
{
    let params = TesterParams::new(epsilon, eta, delta)?;
    let est_params = derive_params(sampler.dim(), params.zeta, params.delta_t)?;
    let estimate = cube_probe_est_with(sampler, known, est_params, seed, options)?;
    Ok(Verdict {
        decision: params.decide(estimate.dtv_estimate),
        estimate,
        params,
    })
}
