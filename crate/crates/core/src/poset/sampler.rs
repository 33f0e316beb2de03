//! Self-reducible linear-extension samplers.
//!
//! Both samplers build extensions one element at a time, choosing among the
//! currently minimal elements. A [`SubcubeCondition`] on free bits is turned
//! into extra relations with [`Poset::condition`]; extensions of the
//! conditioned poset are then drawn with exactly the sampler's conditional
//! law. A contradictory condition has zero mass and yields a uniform point of
//! the subcube.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use super::count::{check_cap, completion_counts, count_extensions, downset_layers};
use super::{bits, FreeBitMap, LinearExtension, Poset, COUNTING_CAP};
use crate::cube::{BitString, ConditionalSampler, KnownDistribution, SubcubeCondition};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Named sampler presets: `uniform`, `biased-equal`, `biased:w1,w2,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerSpec {
    Uniform,
    /// Greedy with unit weight on every element.
    BiasedEqual,
    /// Greedy with one positive weight per element, in label order.
    Biased(Vec<f64>),
}

impl SamplerSpec {
    /// Per-element weights for the greedy family, `None` for uniform.
    pub fn weights(&self, k: usize) -> Result<Option<Vec<f64>>> {
        match self {
            SamplerSpec::Uniform => Ok(None),
            SamplerSpec::BiasedEqual => Ok(Some(vec![1.0; k])),
            SamplerSpec::Biased(w) => {
                if w.len() != k {
                    return Err(Error::InvalidParameter(format!(
                        "{} weights given for {k} elements",
                        w.len()
                    )));
                }
                Ok(Some(w.clone()))
            }
        }
    }

    pub fn build(&self, p: &Poset) -> Result<PosetSampler> {
        match self.weights(p.len())? {
            None => Ok(PosetSampler::Uniform(UniformExtensionSampler::new(p)?)),
            Some(w) => Ok(PosetSampler::Biased(BiasedExtensionSampler::new(p, w)?)),
        }
    }
}

impl fmt::Display for SamplerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerSpec::Uniform => f.write_str("uniform"),
            SamplerSpec::BiasedEqual => f.write_str("biased-equal"),
            SamplerSpec::Biased(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "biased:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for SamplerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SamplerSpec::Uniform),
            "biased-equal" => Ok(SamplerSpec::BiasedEqual),
            _ => {
                let list = s.strip_prefix("biased:").ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown sampler {s:?}; expected uniform, biased-equal or biased:w1,w2,..."
                    ))
                })?;
                let weights = list
                    .split(',')
                    .map(|w| {
                        w.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("weight {w:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SamplerSpec::Biased(weights))
            }
        }
    }
}

/// Either preset, as one clonable sampler type.
#[derive(Debug, Clone)]
pub enum PosetSampler {
    Uniform(UniformExtensionSampler),
    Biased(BiasedExtensionSampler),
}

impl PosetSampler {
    pub fn draw_extension(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> Result<LinearExtension> {
        match self {
            PosetSampler::Uniform(s) => s.draw_extension(cond, rng),
            PosetSampler::Biased(s) => s.draw_extension(cond, rng),
        }
    }
}

impl ConditionalSampler for PosetSampler {
    fn dim(&self) -> usize {
        match self {
            PosetSampler::Uniform(s) => s.dim(),
            PosetSampler::Biased(s) => s.dim(),
        }
    }

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString {
        match self {
            PosetSampler::Uniform(s) => s.draw(cond, rng),
            PosetSampler::Biased(s) => s.draw(cond, rng),
        }
    }
}

/// Walks one extension: at each step, picks among `candidates(placed)` using
/// `choose`, which receives the candidate list and returns an index into it.
fn walk(
    p: &Poset,
    mut choose: impl FnMut(u64, &[usize]) -> usize,
) -> LinearExtension {
    let mut placed = 0u64;
    let mut order = Vec::with_capacity(p.len());
    let mut cands = Vec::with_capacity(p.len());
    while order.len() < p.len() {
        cands.clear();
        cands.extend(bits(p.available(placed)));
        let m = cands[choose(placed, &cands)];
        placed |= 1 << m;
        order.push(m);
    }
    LinearExtension { order }
}

/// Per-condition state shared by clones of a sampler.
#[derive(Debug)]
enum Prepared<T> {
    Empty,
    Table { poset: Poset, table: HashMap<u64, T> },
}

/// One-slot cache: estimation calls `draw` thousands of times in a row with
/// the same condition.
#[derive(Debug, Clone)]
struct Cache<T> {
    slot: Option<(SubcubeCondition, Arc<Prepared<T>>)>,
}

impl<T> Cache<T> {
    fn new() -> Self {
        Self { slot: None }
    }

    fn get_or_insert(
        &mut self,
        cond: &SubcubeCondition,
        build: impl FnOnce() -> Result<Prepared<T>>,
    ) -> Result<Arc<Prepared<T>>> {
        if let Some((c, prep)) = &self.slot {
            if c == cond {
                return Ok(Arc::clone(prep));
            }
        }
        let prep = Arc::new(build()?);
        self.slot = Some((cond.clone(), Arc::clone(&prep)));
        Ok(prep)
    }
}

fn conditioned(p: &Poset, map: &FreeBitMap, cond: &SubcubeCondition) -> Result<Option<Poset>> {
    match p.condition(map, cond) {
        Ok(q) => Ok(Some(q)),
        Err(Error::Contradiction { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Exactly uniform over linear extensions: each minimal element is chosen in
/// proportion to the number of extensions that start with it.
#[derive(Debug, Clone)]
pub struct UniformExtensionSampler {
    poset: Arc<Poset>,
    map: Arc<FreeBitMap>,
    cache: Cache<u128>,
}

impl UniformExtensionSampler {
    pub fn new(p: &Poset) -> Result<Self> {
        check_cap(p, COUNTING_CAP)?;
        Ok(Self {
            poset: Arc::new(p.clone()),
            map: Arc::new(p.free_map()),
            cache: Cache::new(),
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn free_map(&self) -> &FreeBitMap {
        &self.map
    }

    fn prepare(&mut self, cond: &SubcubeCondition) -> Result<Arc<Prepared<u128>>> {
        let (p, map) = (&self.poset, &self.map);
        self.cache.get_or_insert(cond, || {
            Ok(match conditioned(p, map, cond)? {
                None => Prepared::Empty,
                Some(q) => {
                    let table = completion_counts(&q)?;
                    Prepared::Table { poset: q, table }
                }
            })
        })
    }

    /// A uniform extension of the conditioned poset, or `ZeroMassPrefix` when
    /// the condition admits none.
    pub fn draw_extension(
        &mut self,
        cond: &SubcubeCondition,
        rng: &mut RngStream,
    ) -> Result<LinearExtension> {
        match &*self.prepare(cond)? {
            Prepared::Empty => Err(Error::ZeroMassPrefix),
            Prepared::Table { poset, table } => {
                // Unrank a uniform index among all completions.
                let mut rank = rng.gen_range(0..table[&0]);
                Ok(walk(poset, |placed, cands| {
                    for (idx, &m) in cands.iter().enumerate() {
                        let c = table[&(placed | 1 << m)];
                        if rank < c {
                            return idx;
                        }
                        rank -= c;
                    }
                    unreachable!("rank exceeds completion count")
                }))
            }
        }
    }
}

impl ConditionalSampler for UniformExtensionSampler {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString {
        match self.draw_extension(cond, rng) {
            Ok(e) => e.to_bits(&self.map),
            Err(Error::ZeroMassPrefix) => cond.uniform_point(rng),
            Err(e) => panic!("uniform extension sampler: {e}"),
        }
    }
}

/// Known mass of the uniform extension distribution: `1 / |L(P)|` on valid
/// encodings, 0 elsewhere.
#[derive(Debug, Clone)]
pub struct UniformExtensionDistribution {
    poset: Arc<Poset>,
    map: Arc<FreeBitMap>,
    count: BigUint,
    point_mass: f64,
}

impl UniformExtensionDistribution {
    pub fn new(p: &Poset) -> Result<Self> {
        let count = count_extensions(p)?;
        let point_mass = BigRational::new(1.into(), count.clone().into())
            .to_f64()
            .unwrap_or(0.0);
        Ok(Self {
            poset: Arc::new(p.clone()),
            map: Arc::new(p.free_map()),
            count,
            point_mass,
        })
    }

    pub fn count(&self) -> &BigUint {
        &self.count
    }
}

impl KnownDistribution for UniformExtensionDistribution {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn mass(&self, x: &BitString) -> f64 {
        match self.poset.bits_to_extension(&self.map, x) {
            Ok(_) => self.point_mass,
            Err(_) => 0.0,
        }
    }
}

pub fn uniform_extension_sampler(
    p: &Poset,
) -> Result<(UniformExtensionSampler, UniformExtensionDistribution)> {
    Ok((UniformExtensionSampler::new(p)?, UniformExtensionDistribution::new(p)?))
}

/// Greedy sampler: picks the next element among the minimal ones with
/// probability proportional to its weight.
///
/// Conditioning reweights each step by the probability that the greedy
/// process, continued from the resulting downset of the original poset, stays
/// inside the conditioned poset. That is the greedy law restricted to the
/// subcube, so the sampler is self-reducible. Running plain greedy on the
/// conditioned poset would not be: the step normalisers change.
#[derive(Debug, Clone)]
pub struct BiasedExtensionSampler {
    poset: Arc<Poset>,
    map: Arc<FreeBitMap>,
    weights: Arc<Vec<f64>>,
    cache: Cache<f64>,
}

impl BiasedExtensionSampler {
    pub fn new(p: &Poset, weights: Vec<f64>) -> Result<Self> {
        check_cap(p, COUNTING_CAP)?;
        if weights.len() != p.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights given for {} elements",
                weights.len(),
                p.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("weight {w} is not positive")));
        }
        Ok(Self {
            poset: Arc::new(p.clone()),
            map: Arc::new(p.free_map()),
            weights: Arc::new(weights),
            cache: Cache::new(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability of stepping to `m` from downset `placed` in the
    /// unconditioned greedy process.
    fn step(&self, placed: u64, m: usize) -> f64 {
        let norm: f64 = bits(self.poset.available(placed))
            .map(|a| self.weights[a])
            .sum();
        self.weights[m] / norm
    }

    fn prepare(&mut self, cond: &SubcubeCondition) -> Result<Arc<Prepared<f64>>> {
        let this = self.clone();
        self.cache.get_or_insert(cond, || {
            let Some(q) = conditioned(&this.poset, &this.map, cond)? else {
                return Ok(Prepared::Empty);
            };
            // stay[d]: probability that greedy from d ends in an extension of q
            let mut stay: HashMap<u64, f64> = HashMap::new();
            stay.insert(q.full_mask(), 1.0);
            for layer in downset_layers(&q).iter().rev().skip(1) {
                for &d in layer {
                    let s = bits(q.available(d))
                        .map(|m| this.step(d, m) * stay[&(d | 1 << m)])
                        .sum();
                    stay.insert(d, s);
                }
            }
            Ok(Prepared::Table {
                poset: q,
                table: stay,
            })
        })
    }

    pub fn draw_extension(
        &mut self,
        cond: &SubcubeCondition,
        rng: &mut RngStream,
    ) -> Result<LinearExtension> {
        let prep = self.prepare(cond)?;
        match &*prep {
            Prepared::Empty => Err(Error::ZeroMassPrefix),
            Prepared::Table { poset, table } => Ok(walk(poset, |placed, cands| {
                let scores: Vec<f64> = cands
                    .iter()
                    .map(|&m| self.step(placed, m) * table[&(placed | 1 << m)])
                    .collect();
                let mut u = rng.uniform() * scores.iter().sum::<f64>();
                for (idx, s) in scores.iter().enumerate() {
                    if u < *s {
                        return idx;
                    }
                    u -= s;
                }
                // rounding: fall back to the last candidate with positive score
                scores.iter().rposition(|s| *s > 0.0).unwrap_or(cands.len() - 1)
            })),
        }
    }
}

impl ConditionalSampler for BiasedExtensionSampler {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString {
        match self.draw_extension(cond, rng) {
            Ok(e) => e.to_bits(&self.map),
            Err(Error::ZeroMassPrefix) => cond.uniform_point(rng),
            Err(e) => panic!("biased extension sampler: {e}"),
        }
    }
}
