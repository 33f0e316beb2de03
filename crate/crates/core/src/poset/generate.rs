//! Synthetic instance families, named `<family>_<param>_<size:03>_<index>`.
//!
//! The generator is seeded from the name alone, so a name always denotes the
//! same poset.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use super::Poset;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Random DAG whose average indegree is the parameter.
    AvgDeg(u32),
    /// Two halves `A`, `B`; each `(a, b)` gets `a ≺ b` with the parameter's
    /// probability.
    Bipartite(f64),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::AvgDeg(d) => write!(f, "avgdeg_{d}"),
            Family::Bipartite(p) => write!(f, "bipartite_{p}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts `avgdeg_3` or `bipartite_0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown family {s:?}"));
        let (name, param) = s.split_once('_').ok_or_else(bad)?;
        match name {
            "avgdeg" => param.parse().map(Family::AvgDeg).map_err(|_| bad()),
            "bipartite" => {
                let p: f64 = param.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                Ok(Family::Bipartite(p))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub name: String,
    pub poset: Poset,
}

/// FNV-1a, used only to turn instance names into seeds.
fn name_seed(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn generate_instance(family: Family, size: usize, index: u32) -> Result<GeneratedInstance> {
    if size == 0 || size > super::MAX_ELEMENTS {
        return Err(Error::InvalidParameter(format!(
            "instance size {size} outside 1..={}",
            super::MAX_ELEMENTS
        )));
    }
    let name = format!("{family}_{size:03}_{index}");
    let mut rng = RngStream::new(name_seed(&name), 0);
    let mut relations = Vec::new();
    match family {
        Family::AvgDeg(deg) => {
            // Edges go forward in a random topological order; each of the
            // C(size, 2) candidate edges is kept with the probability that
            // makes the expected indegree `deg`.
            let mut topo: Vec<usize> = (1..=size).collect();
            topo.shuffle(&mut rng);
            let keep = if size > 1 {
                (2.0 * deg as f64 / (size - 1) as f64).min(1.0)
            } else {
                0.0
            };
            for i in 0..size {
                for j in i + 1..size {
                    if rng.uniform() < keep {
                        relations.push((topo[i], topo[j]));
                    }
                }
            }
        }
        Family::Bipartite(p) => {
            let mut labels: Vec<usize> = (1..=size).collect();
            labels.shuffle(&mut rng);
            let (a, b) = labels.split_at(size / 2);
            for &x in a {
                for &y in b {
                    if rng.uniform() < p {
                        relations.push((x, y));
                    }
                }
            }
        }
    }
    Ok(GeneratedInstance {
        name,
        poset: Poset::from_relations(size, &relations)?,
    })
}
