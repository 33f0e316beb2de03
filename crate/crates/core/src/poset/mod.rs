//! Posets and their linear extensions as points of a hypercube.
//!
//! Elements are labelled `1..=k` in instance files and `0..k` internally; the
//! label order is the base linear order. Pair `(i, j)` with `i < j` of the
//! upper triangle reads `1` when `i` precedes `j`, `0` when `j` precedes `i`,
//! and `*` when the poset leaves it open. The open pairs, in row-major order,
//! are the free coordinates of the cube.

mod cnf;
mod count;
mod generate;
mod sampler;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cube::{BitString, SubcubeCondition};
use crate::error::{Error, Result};

pub use cnf::{encode_cnf, Cnf};
pub use count::{count_extensions, count_extensions_capped};
pub use generate::{generate_instance, Family, GeneratedInstance};
pub use sampler::{
    uniform_extension_sampler, BiasedExtensionSampler, PosetSampler, SamplerSpec,
    UniformExtensionDistribution, UniformExtensionSampler,
};

/// Elements are stored as bits of a `u64`.
pub const MAX_ELEMENTS: usize = 64;
pub const ENUMERATION_CAP: usize = 10;
pub const COUNTING_CAP: usize = 20;

/// One cell of the poset matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Diag,
    /// Row element precedes column element.
    Below,
    /// Column element precedes row element.
    Above,
    Star,
}

impl Relation {
    pub fn symbol(self) -> char {
        match self {
            Relation::Diag | Relation::Below => '1',
            Relation::Above => '0',
            Relation::Star => '*',
        }
    }
}

/// On-disk instance: `elements` is `k`, each relation `[a, b]` means `a ⪯ b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub elements: usize,
    pub relations: Vec<[usize; 2]>,
}

/// A transitively closed strict order on `0..k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    k: usize,
    /// `succ[a]` has bit `b` set iff `a ≺ b`.
    succ: Vec<u64>,
    /// `pred[b]` has bit `a` set iff `a ≺ b`.
    pred: Vec<u64>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset")
            .field("k", &self.k)
            .field("relations", &self.relations_labelled())
            .finish()
    }
}

impl Poset {
    /// The antichain on `k` elements.
    pub fn antichain(k: usize) -> Result<Self> {
        if k > MAX_ELEMENTS {
            return Err(Error::TooLarge {
                what: "element count",
                size: k,
                cap: MAX_ELEMENTS,
            });
        }
        Ok(Self {
            k,
            succ: vec![0; k],
            pred: vec![0; k],
        })
    }

    /// The chain `1 ⪯ 2 ⪯ … ⪯ k`.
    pub fn chain(k: usize) -> Result<Self> {
        let rels: Vec<(usize, usize)> = (1..k).map(|a| (a, a + 1)).collect();
        Self::from_relations(k, &rels)
    }

    /// Builds and closes a poset from 1-based `(a, b)` pairs meaning `a ⪯ b`.
    /// Reflexive pairs are ignored.
    pub fn from_relations(k: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let mut p = Self::antichain(k)?;
        for &(a, b) in relations {
            for label in [a, b] {
                if label == 0 || label > k {
                    return Err(Error::Parse(format!(
                        "element {label} outside 1..={k}"
                    )));
                }
            }
            if a != b {
                p.succ[a - 1] |= 1 << (b - 1);
            }
        }
        p.close()?;
        Ok(p)
    }

    pub fn from_instance(inst: &InstanceFile) -> Result<Self> {
        let rels: Vec<(usize, usize)> = inst.relations.iter().map(|r| (r[0], r[1])).collect();
        Self::from_relations(inst.elements, &rels)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let inst: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_instance(&inst)
    }

    /// Instance document listing the cover relations.
    pub fn to_instance(&self) -> InstanceFile {
        InstanceFile {
            elements: self.k,
            relations: self
                .cover_relations()
                .into_iter()
                .map(|(a, b)| [a + 1, b + 1])
                .collect(),
        }
    }

    fn close(&mut self) -> Result<()> {
        for m in 0..self.k {
            let via = self.succ[m];
            for a in 0..self.k {
                if self.succ[a] >> m & 1 == 1 {
                    self.succ[a] |= via;
                }
            }
        }
        if let Some(a) = (0..self.k).find(|&a| self.succ[a] >> a & 1 == 1) {
            return Err(Error::Cycle { element: a + 1 });
        }
        self.rebuild_pred();
        Ok(())
    }

    fn rebuild_pred(&mut self) {
        self.pred = vec![0; self.k];
        for a in 0..self.k {
            for b in bits(self.succ[a]) {
                self.pred[b] |= 1 << a;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub(crate) fn full_mask(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        }
    }

    /// Strict order on 0-based elements.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.succ[a] >> b & 1 == 1
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        a == b || self.precedes(a, b) || self.precedes(b, a)
    }

    /// Elements outside `placed` whose predecessors all lie in `placed`.
    pub(crate) fn available(&self, placed: u64) -> u64 {
        let mut out = 0;
        for m in 0..self.k {
            if placed >> m & 1 == 0 && self.pred[m] & !placed == 0 {
                out |= 1 << m;
            }
        }
        out
    }

    pub fn relation(&self, i: usize, j: usize) -> Relation {
        if i == j {
            Relation::Diag
        } else if self.precedes(i, j) {
            Relation::Below
        } else if self.precedes(j, i) {
            Relation::Above
        } else {
            Relation::Star
        }
    }

    /// All strict pairs as 1-based labels, row-major.
    pub fn relations_labelled(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.k {
            for b in bits(self.succ[a]) {
                out.push((a + 1, b + 1));
            }
        }
        out
    }

    /// 0-based pairs `a ≺ b` with nothing strictly between them.
    pub fn cover_relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.k {
            for b in bits(self.succ[a]) {
                if self.succ[a] & self.pred[b] == 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn free_map(&self) -> FreeBitMap {
        let mut pairs = Vec::new();
        for i in 0..self.k {
            for j in i + 1..self.k {
                if !self.comparable(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        FreeBitMap { k: self.k, pairs }
    }

    pub fn encode_matrix(&self) -> MatrixEncoding {
        let matrix: Vec<Vec<Relation>> = (0..self.k)
            .map(|i| (0..self.k).map(|j| self.relation(i, j)).collect())
            .collect();
        let mut unrolled = String::with_capacity(self.k * self.k.saturating_sub(1) / 2);
        for i in 0..self.k {
            for j in i + 1..self.k {
                unrolled.push(matrix[i][j].symbol());
            }
        }
        MatrixEncoding {
            matrix,
            unrolled,
            free: self.free_map(),
        }
    }

    /// Adds `a ≺ b` (0-based) and re-closes.
    pub fn with_relation(&self, a: usize, b: usize) -> Result<Self> {
        if a == b || self.precedes(b, a) {
            return Err(Error::Contradiction { a: a + 1, b: b + 1 });
        }
        let mut next = self.clone();
        if self.precedes(a, b) {
            return Ok(next);
        }
        let down = self.pred[a] | 1 << a;
        let up = self.succ[b] | 1 << b;
        for x in bits(down) {
            next.succ[x] |= up;
        }
        for y in bits(up) {
            next.pred[y] |= down;
        }
        Ok(next)
    }

    /// Fixes the free coordinate `free_index` of `map` (the map of the poset
    /// the coordinates were taken from, not necessarily of `self`): bit 1
    /// orders the pair as in the base order, bit 0 reverses it.
    pub fn subcond(&self, map: &FreeBitMap, free_index: usize, bit: bool) -> Result<Self> {
        let &(i, j) = map.pairs.get(free_index).ok_or(Error::IndexOutOfRange {
            index: free_index,
            dim: map.dim(),
        })?;
        if map.k != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: map.k,
            });
        }
        if bit {
            self.with_relation(i, j)
        } else {
            self.with_relation(j, i)
        }
    }

    /// Applies every fixed coordinate of `cond` in ascending order.
    pub fn condition(&self, map: &FreeBitMap, cond: &SubcubeCondition) -> Result<Self> {
        if cond.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                found: cond.dim(),
            });
        }
        let mut p = self.clone();
        for (index, bit) in cond.iter() {
            p = p.subcond(map, index, bit)?;
        }
        Ok(p)
    }

    /// Decodes free bits into the extension they describe.
    pub fn bits_to_extension(&self, map: &FreeBitMap, x: &BitString) -> Result<LinearExtension> {
        if x.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                found: x.dim(),
            });
        }
        let mut before = self.succ.clone();
        for (idx, &(i, j)) in map.pairs.iter().enumerate() {
            let (a, b) = if x.get(idx) { (i, j) } else { (j, i) };
            if self.precedes(b, a) {
                return Err(Error::InvalidEncoding(x.to_string()));
            }
            before[a] |= 1 << b;
        }
        // Every pair is now oriented; the tournament is a total order iff
        // its out-degrees are pairwise distinct.
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by_key(|&a| std::cmp::Reverse(before[a].count_ones()));
        let transitive = order
            .iter()
            .enumerate()
            .all(|(rank, &a)| before[a].count_ones() as usize == self.k - 1 - rank);
        if !transitive {
            return Err(Error::InvalidEncoding(x.to_string()));
        }
        Ok(LinearExtension { order })
    }

    pub fn enumerate_extensions(&self) -> Result<Vec<LinearExtension>> {
        self.enumerate_extensions_capped(ENUMERATION_CAP)
    }

    /// Every linear extension, in lexicographic order of the label sequence.
    pub fn enumerate_extensions_capped(&self, cap: usize) -> Result<Vec<LinearExtension>> {
        if self.k > cap {
            return Err(Error::TooLarge {
                what: "element count",
                size: self.k,
                cap,
            });
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.k);
        self.extend_all(0, &mut prefix, &mut out);
        debug_assert!(out.iter().all(|e| e.respects(self)));
        Ok(out)
    }

    fn extend_all(&self, placed: u64, prefix: &mut Vec<usize>, out: &mut Vec<LinearExtension>) {
        if prefix.len() == self.k {
            out.push(LinearExtension {
                order: prefix.clone(),
            });
            return;
        }
        for m in bits(self.available(placed)) {
            prefix.push(m);
            self.extend_all(placed | 1 << m, prefix, out);
            prefix.pop();
        }
    }
}

/// The upper-triangle pairs left open by a poset, in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeBitMap {
    k: usize,
    pairs: Vec<(usize, usize)>,
}

impl FreeBitMap {
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn elements(&self) -> usize {
        self.k
    }

    /// 0-based `(i, j)`, `i < j`.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// 1-based pair labels.
    pub fn labelled_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (i, j))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixEncoding {
    pub matrix: Vec<Vec<Relation>>,
    /// Row-major upper triangle over `{0, 1, *}`.
    pub unrolled: String,
    pub free: FreeBitMap,
}

/// A total order of the `k` elements, earliest first, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearExtension {
    order: Vec<usize>,
}

impl LinearExtension {
    /// From 0-based elements; must be a permutation of `0..k`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let k = order.len();
        let mut seen = vec![false; k];
        for &e in &order {
            if e >= k || std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidParameter(format!(
                    "{order:?} is not a permutation of 0..{k}"
                )));
            }
        }
        Ok(Self { order })
    }

    /// From 1-based labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| l.wrapping_sub(1)).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn labels(&self) -> Vec<usize> {
        self.order.iter().map(|&e| e + 1).collect()
    }

    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &e) in self.order.iter().enumerate() {
            pos[e] = p;
        }
        pos
    }

    pub fn respects(&self, p: &Poset) -> bool {
        if self.order.len() != p.len() {
            return false;
        }
        let pos = self.positions();
        (0..p.len()).all(|a| bits(p.succ[a]).all(|b| pos[a] < pos[b]))
    }

    /// Free bits under `map`: the bit of pair `(i, j)` is 1 iff `i` comes
    /// before `j`.
    pub fn to_bits(&self, map: &FreeBitMap) -> BitString {
        let pos = self.positions();
        BitString::new(map.pairs.iter().map(|&(i, j)| pos[i] < pos[j]).collect())
    }
}

impl fmt::Display for LinearExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "({})", labels.join(","))
    }
}

pub fn extension_to_bits(e: &LinearExtension, map: &FreeBitMap) -> BitString {
    e.to_bits(map)
}

/// Indices of the set bits of `mask`, ascending.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}
