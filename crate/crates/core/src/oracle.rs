//! Exact ground truth for small instances.
//!
//! Distributions are built by enumerating every linear extension and carry
//! rational masses; nothing here shares code with the samplers' downset
//! tables, so the two can be checked against each other.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cube::{BitString, ConditionalSampler, KnownDistribution, SubcubeCondition};
use crate::error::{Error, Result};
use crate::poset::{Poset, SamplerSpec};
use crate::rng::RngStream;

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A distribution over `{0,1}^n` with exact masses. Points of zero mass are
/// absent from `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    n: usize,
    support: BTreeMap<BitString, BigRational>,
}

impl ExactDistribution {
    /// Validates dimensions, non-negativity and total mass 1.
    pub fn new(n: usize, masses: impl IntoIterator<Item = (BitString, BigRational)>) -> Result<Self> {
        let mut support = BTreeMap::new();
        for (x, m) in masses {
            if x.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.dim(),
                });
            }
            if m.is_negative() {
                return Err(Error::InvalidParameter(format!("negative mass at {x}")));
            }
            if !m.is_zero() {
                *support.entry(x).or_insert_with(BigRational::zero) += m;
            }
        }
        let total: BigRational = support.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { n, support })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &BTreeMap<BitString, BigRational> {
        &self.support
    }

    pub fn mass_of(&self, x: &BitString) -> BigRational {
        self.support.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Mass of the subcube `cond`.
    pub fn mass_within(&self, cond: &SubcubeCondition) -> BigRational {
        self.support
            .iter()
            .filter(|(x, _)| cond.contains(x))
            .map(|(_, m)| m)
            .sum()
    }
}

impl KnownDistribution for ExactDistribution {
    fn dim(&self) -> usize {
        self.n
    }

    fn mass(&self, x: &BitString) -> f64 {
        self.support.get(x).map(to_f64).unwrap_or(0.0)
    }
}

/// Draws by inverting the cumulative table restricted to the subcube.
impl ConditionalSampler for ExactDistribution {
    fn dim(&self) -> usize {
        self.n
    }

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString {
        let inside: Vec<(&BitString, f64)> = self
            .support
            .iter()
            .filter(|(x, _)| cond.contains(x))
            .map(|(x, m)| (x, to_f64(m)))
            .collect();
        let total: f64 = inside.iter().map(|(_, m)| m).sum();
        if inside.is_empty() || total <= 0.0 {
            return cond.uniform_point(rng);
        }
        let mut u = rng.uniform() * total;
        for (x, m) in &inside {
            if u < *m {
                return (*x).clone();
            }
            u -= m;
        }
        inside.last().unwrap().0.clone()
    }
}

fn rational_weight(w: f64) -> Result<BigRational> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidParameter(format!("weight {w} is not positive")));
    }
    BigRational::from_float(w)
        .ok_or_else(|| Error::InvalidParameter(format!("weight {w} not representable")))
}

/// Law of a preset sampler on `p`, by enumeration.
pub fn exact_distribution(spec: &SamplerSpec, p: &Poset) -> Result<ExactDistribution> {
    let extensions = p.enumerate_extensions()?;
    let map = p.free_map();
    let n = map.dim();
    match spec.weights(p.len())? {
        None => {
            let each = BigRational::new(BigInt::one(), BigInt::from(extensions.len()));
            ExactDistribution::new(n, extensions.iter().map(|e| (e.to_bits(&map), each.clone())))
        }
        Some(w) => {
            let w: Vec<BigRational> = w.into_iter().map(rational_weight).collect::<Result<_>>()?;
            let masses = extensions.iter().map(|e| {
                let mut placed = vec![false; p.len()];
                let mut prob = BigRational::one();
                for &m in e.order() {
                    // minimal among the unplaced: every predecessor placed
                    let norm: BigRational = (0..p.len())
                        .filter(|&a| !placed[a] && (0..p.len()).all(|b| !p.precedes(b, a) || placed[b]))
                        .map(|a| w[a].clone())
                        .sum();
                    prob *= &w[m] / norm;
                    placed[m] = true;
                }
                (e.to_bits(&map), prob)
            });
            ExactDistribution::new(n, masses.collect::<Vec<_>>())
        }
    }
}

/// `sum_x max(0, P(x) - Q(x))`.
pub fn exact_tv(p: &ExactDistribution, q: &ExactDistribution) -> Result<BigRational> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch {
            expected: p.n,
            found: q.n,
        });
    }
    Ok(p.support
        .iter()
        .map(|(x, m)| m - q.mass_of(x))
        .filter(|d| d.is_positive())
        .sum())
}

/// `Pr[x_coord = 1 | x in prefix]`.
pub fn exact_marginal(
    dist: &ExactDistribution,
    prefix: &SubcubeCondition,
    coord: usize,
) -> Result<BigRational> {
    if prefix.dim() != dist.n {
        return Err(Error::DimensionMismatch {
            expected: dist.n,
            found: prefix.dim(),
        });
    }
    if coord >= dist.n {
        return Err(Error::IndexOutOfRange {
            index: coord,
            dim: dist.n,
        });
    }
    let within = dist.mass_within(prefix);
    if within.is_zero() {
        return Err(Error::ZeroMassPrefix);
    }
    let ones: BigRational = dist
        .support
        .iter()
        .filter(|(x, _)| prefix.contains(x) && x.get(coord))
        .map(|(_, m)| m)
        .sum();
    Ok(ones / within)
}
