//! Linear-extension counting by dynamic programming over downsets.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{bits, Poset, COUNTING_CAP};
use crate::error::{Error, Result};

pub fn count_extensions(p: &Poset) -> Result<BigUint> {
    count_extensions_capped(p, COUNTING_CAP)
}

/// `|L(P)|`, walking downsets one layer (downset size) at a time.
pub fn count_extensions_capped(p: &Poset, cap: usize) -> Result<BigUint> {
    check_cap(p, cap)?;
    let mut layer: HashMap<u64, BigUint> = HashMap::from([(0u64, BigUint::one())]);
    for _ in 0..p.len() {
        let mut next: HashMap<u64, BigUint> = HashMap::with_capacity(layer.len());
        for (down, ways) in layer {
            for m in bits(p.available(down)) {
                *next.entry(down | 1 << m).or_insert_with(BigUint::zero) += &ways;
            }
        }
        layer = next;
    }
    Ok(layer.remove(&p.full_mask()).unwrap_or_else(BigUint::zero))
}

pub(crate) fn check_cap(p: &Poset, cap: usize) -> Result<()> {
    if p.len() > cap {
        return Err(Error::TooLarge {
            what: "element count",
            size: p.len(),
            cap,
        });
    }
    Ok(())
}

/// Every downset of `p`, grouped by size.
pub(crate) fn downset_layers(p: &Poset) -> Vec<Vec<u64>> {
    let mut layers = vec![vec![0u64]];
    for _ in 0..p.len() {
        let mut next: Vec<u64> = layers
            .last()
            .unwrap()
            .iter()
            .flat_map(|&d| bits(p.available(d)).map(move |m| d | 1 << m))
            .collect();
        next.sort_unstable();
        next.dedup();
        layers.push(next);
    }
    layers
}

/// Number of ways to finish an extension from each downset.
pub(crate) fn completion_counts(p: &Poset) -> Result<HashMap<u64, u128>> {
    let layers = downset_layers(p);
    let mut table: HashMap<u64, u128> = HashMap::new();
    table.insert(p.full_mask(), 1);
    for layer in layers.iter().rev().skip(1) {
        for &d in layer {
            let mut total: u128 = 0;
            for m in bits(p.available(d)) {
                total = total
                    .checked_add(table[&(d | 1 << m)])
                    .ok_or(Error::TooLarge {
                        what: "extension count bits",
                        size: 129,
                        cap: 128,
                    })?;
            }
            table.insert(d, total);
        }
    }
    Ok(table)
}
