//! CNF encoding of the linear extensions of a poset.
//!
//! One variable per unordered pair `a < b` (base order), numbered from 1 in
//! row-major upper-triangle order; it is true iff `a ⪯ b`. Unit clauses pin
//! every relation of the closed order, and one transitivity clause per
//! ordered triple of distinct elements rules out cycles.

use std::fmt::Write as _;

use super::Poset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    /// Relation unit clauses come first, then transitivity clauses.
    pub clauses: Vec<Vec<i64>>,
    pub relation_clauses: usize,
    pub transitivity_clauses: usize,
}

impl Cnf {
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Whether `assignment` (index `v - 1` holds variable `v`) satisfies
    /// every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = assignment[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}

/// 1-based variable of the unordered pair `{a, b}`, `a != b`, 0-based elements.
pub(crate) fn pair_var(k: usize, a: usize, b: usize) -> usize {
    let (i, j) = (a.min(b), a.max(b));
    // pairs in rows before i, then the offset within row i
    i * (2 * k - i - 1) / 2 + (j - i - 1) + 1
}

/// Literal asserting `a ⪯ b`.
fn precedes_lit(k: usize, a: usize, b: usize) -> i64 {
    let v = pair_var(k, a, b) as i64;
    if a < b {
        v
    } else {
        -v
    }
}

pub fn encode_cnf(p: &Poset) -> Cnf {
    let k = p.len();
    let mut clauses = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if p.precedes(a, b) {
                clauses.push(vec![precedes_lit(k, a, b)]);
            }
        }
    }
    let relation_clauses = clauses.len();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if a != b && b != c && a != c {
                    clauses.push(vec![
                        -precedes_lit(k, a, b),
                        -precedes_lit(k, b, c),
                        precedes_lit(k, a, c),
                    ]);
                }
            }
        }
    }
    let transitivity_clauses = clauses.len() - relation_clauses;
    Cnf {
        num_vars: k * k.saturating_sub(1) / 2,
        clauses,
        relation_clauses,
        transitivity_clauses,
    }
}
