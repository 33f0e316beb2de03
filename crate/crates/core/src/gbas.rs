//! Gamma Bernoulli approximation of a single conditional marginal.
//!
//! Draw from the sampler until `k` draws show `head` at the target coordinate.
//! Each draw, successful or not, adds one `Exp(1)` variate to a running sum
//! `r`, so at termination `r ~ Gamma(k, p)` and `(k - 1) / r` is an unbiased
//! estimate of `p` with relative error `eps` except with probability `delta`
//! once `k >= 3 ln(2/delta) / eps^2`. The expected number of draws is `k / p`.

use serde::{Deserialize, Serialize};

use crate::cube::{ConditionalSampler, SubcubeCondition};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Smallest marginal the default draw budget is sized for.
pub const EPSILON_FLOOR: f64 = 1e-6;

/// `1000 * k / EPSILON_FLOOR`, saturating.
pub fn default_max_draws(k: u64) -> u64 {
    let budget = 1000.0 * k as f64 / EPSILON_FLOOR;
    if budget >= u64::MAX as f64 {
        u64::MAX
    } else {
        budget as u64
    }
}

/// Inverse CDF of `Exp(1)` at `u` in `[0, 1)`.
pub fn exp1_from_uniform(u: f64) -> f64 {
    -(-u).ln_1p()
}

pub fn sample_exp1(rng: &mut RngStream) -> f64 {
    exp1_from_uniform(rng.uniform())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbasResult {
    pub p_hat: f64,
    /// Sampler calls made.
    pub draws: u64,
    /// Sum of the exponential variates, one per draw.
    pub r: f64,
    /// Successes observed; equals `k` on return.
    pub s: u64,
}

/// Estimates `Pr[x_coord == head]` for `x` drawn from `sampler` conditioned on
/// `cond`.
pub fn gbas_estimate<S: ConditionalSampler + ?Sized>(
    sampler: &mut S,
    cond: &SubcubeCondition,
    coord: usize,
    head: bool,
    k: u64,
    rng: &mut RngStream,
    max_draws: u64,
) -> Result<GbasResult> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("GBAS needs k >= 2, got {k}")));
    }
    if cond.dim() != sampler.dim() {
        return Err(Error::DimensionMismatch {
            expected: sampler.dim(),
            found: cond.dim(),
        });
    }
    if coord >= cond.dim() {
        return Err(Error::IndexOutOfRange {
            index: coord,
            dim: cond.dim(),
        });
    }
    if cond.is_fixed(coord) {
        return Err(Error::InvalidParameter(format!(
            "coordinate {coord} is fixed by the condition"
        )));
    }

    let mut s = 0u64;
    let mut r = 0.0f64;
    let mut draws = 0u64;
    while s < k {
        if draws >= max_draws {
            return Err(Error::BudgetExhausted {
                draws,
                successes: s,
                target: k,
            });
        }
        let w = sampler.draw(cond, rng);
        draws += 1;
        if w.get(coord) == head {
            s += 1;
        }
        r += sample_exp1(rng);
    }
    Ok(GbasResult {
        p_hat: (k - 1) as f64 / r,
        draws,
        r,
        s,
    })
}
