#![allow(dead_code)]

use cubeprobe::poset::{generate_instance, Family, Poset};

pub fn fork4() -> Poset {
    Poset::parse(r#"{"elements":4,"relations":[[1,2],[1,3],[2,4]]}"#).unwrap()
}

/// Small posets covering chains, antichains, trees and generated families.
pub fn small_posets() -> Vec<(String, Poset)> {
    let mut out = vec![
        ("fork4".to_string(), fork4()),
        ("chain_3".to_string(), Poset::chain(3).unwrap()),
        ("antichain_3".to_string(), Poset::antichain(3).unwrap()),
        ("antichain_4".to_string(), Poset::antichain(4).unwrap()),
        ("vee_4".to_string(), Poset::from_relations(4, &[(1, 2), (1, 3), (1, 4)]).unwrap()),
        ("two_chains_5".to_string(), Poset::from_relations(5, &[(1, 3), (3, 5), (2, 4)]).unwrap()),
        ("single".to_string(), Poset::antichain(1).unwrap()),
    ];
    for (family, size, index) in [
        (Family::AvgDeg(1), 5, 0),
        (Family::AvgDeg(2), 6, 1),
        (Family::Bipartite(0.3), 6, 2),
        (Family::Bipartite(0.5), 5, 3),
        (Family::AvgDeg(3), 8, 2),
    ] {
        let g = generate_instance(family, size, index).unwrap();
        out.push((g.name, g.poset));
    }
    out
}
