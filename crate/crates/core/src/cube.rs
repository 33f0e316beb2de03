//! Points, subcubes and the two sampler roles over `{0,1}^n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A point of the hypercube. Coordinate 0 is the leftmost character of the
/// textual form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// The `n`-bit string whose coordinate `i` is bit `n - 1 - i` of `value`,
    /// so that `from_index(0b110, 3)` reads as `"110"`.
    pub fn from_index(value: u64, n: usize) -> Self {
        Self((0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.0[i] = bit;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Every string of dimension `n`, in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64, "cannot enumerate 2^{n} strings");
        (0..1u64 << n).map(move |v| BitString::from_index(v, n))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subcube: some coordinates pinned, the rest free. The empty set of pins is
/// the whole cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubcubeCondition {
    dim: usize,
    fixed: BTreeMap<usize, bool>,
}

impl SubcubeCondition {
    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            fixed: BTreeMap::new(),
        }
    }

    /// Builds a condition from `(index, bit)` pairs. Repeating a pair with the
    /// same bit is harmless; repeating it with a different bit is an error.
    pub fn new(dim: usize, pairs: &[(usize, bool)]) -> Result<Self> {
        let mut cond = Self::full(dim);
        for &(index, bit) in pairs {
            cond.fix(index, bit)?;
        }
        Ok(cond)
    }

    /// Pins coordinates `0..len` to the leading bits of `x`.
    pub fn prefix(x: &BitString, len: usize) -> Self {
        assert!(len <= x.dim(), "prefix length {len} exceeds dimension {}", x.dim());
        Self {
            dim: x.dim(),
            fixed: (0..len).map(|i| (i, x.get(i))).collect(),
        }
    }

    pub fn fix(&mut self, index: usize, bit: bool) -> Result<()> {
        if index >= self.dim {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.dim,
            });
        }
        match self.fixed.insert(index, bit) {
            Some(prev) if prev != bit => {
                self.fixed.insert(index, prev);
                Err(Error::DuplicateCoordinate { index })
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.fixed.get(&index).copied()
    }

    pub fn is_fixed(&self, index: usize) -> bool {
        self.fixed.contains_key(&index)
    }

    pub fn is_full_cube(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.len()
    }

    /// Fixed pairs in ascending coordinate order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.fixed.iter().map(|(&i, &b)| (i, b))
    }

    pub fn contains(&self, x: &BitString) -> bool {
        x.dim() == self.dim && self.iter().all(|(i, b)| x.get(i) == b)
    }

    /// A uniform point of the subcube. This is what a sampler returns when the
    /// subcube carries no mass.
    pub fn uniform_point(&self, rng: &mut RngStream) -> BitString {
        let mut x = BitString::zeros(self.dim);
        for i in 0..self.dim {
            let bit = match self.get(i) {
                Some(b) => b,
                None => rng.coin(),
            };
            x.set(i, bit);
        }
        x
    }
}

/// Subcube-conditional access to a distribution over `{0,1}^n`.
///
/// `draw` must return a point of `cond`, distributed as the sampler's output
/// conditioned on landing in `cond`. When that event has probability zero the
/// draw is uniform over `cond`. Taking `&mut self` lets implementations keep
/// per-condition caches; parallel callers hand each worker its own clone.
pub trait ConditionalSampler {
    fn dim(&self) -> usize;

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString;
}

impl<S: ConditionalSampler + ?Sized> ConditionalSampler for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString {
        (**self).draw(cond, rng)
    }
}

/// A distribution whose mass is known exactly at every point.
pub trait KnownDistribution {
    fn dim(&self) -> usize;

    /// Mass at `x`. Callers guarantee `x.dim() == self.dim()`.
    fn mass(&self, x: &BitString) -> f64;
}

impl<K: KnownDistribution + ?Sized> KnownDistribution for &K {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn mass(&self, x: &BitString) -> f64 {
        (**self).mass(x)
    }
}

impl<K: KnownDistribution + ?Sized> KnownDistribution for Box<K> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn mass(&self, x: &BitString) -> f64 {
        (**self).mass(x)
    }
}

pub fn evaluate_mass<K: KnownDistribution + ?Sized>(known: &K, x: &BitString) -> Result<f64> {
    if x.dim() != known.dim() {
        return Err(Error::DimensionMismatch {
            expected: known.dim(),
            found: x.dim(),
        });
    }
    Ok(known.mass(x))
}

/// Independent coordinates, coordinate `i` equal to 1 with probability
/// `ones[i]`. Serves both roles; conditioning on a subcube leaves the free
/// coordinates untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution {
    ones: Vec<f64>,
}

impl ProductDistribution {
    pub fn new(ones: Vec<f64>) -> Result<Self> {
        if let Some(p) = ones.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!(
                "coordinate probability {p} outside [0, 1]"
            )));
        }
        Ok(Self { ones })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            ones: vec![0.5; n],
        }
    }

    fn bit_mass(&self, i: usize, bit: bool) -> f64 {
        if bit {
            self.ones[i]
        } else {
            1.0 - self.ones[i]
        }
    }
}

impl ConditionalSampler for ProductDistribution {
    fn dim(&self) -> usize {
        self.ones.len()
    }

    fn draw(&mut self, cond: &SubcubeCondition, rng: &mut RngStream) -> BitString {
        if cond.iter().any(|(i, b)| self.bit_mass(i, b) == 0.0) {
            return cond.uniform_point(rng);
        }
        let mut x = BitString::zeros(self.ones.len());
        for (i, &p) in self.ones.iter().enumerate() {
            let bit = match cond.get(i) {
                Some(b) => b,
                None => rng.uniform() < p,
            };
            x.set(i, bit);
        }
        x
    }
}

impl KnownDistribution for ProductDistribution {
    fn dim(&self) -> usize {
        self.ones.len()
    }

    fn mass(&self, x: &BitString) -> f64 {
        (0..self.ones.len()).map(|i| self.bit_mass(i, x.get(i))).product()
    }
}
