//! Seeded instance generators shared by the benchmarks.

use hfc_core::{FlowHypergraph, Hypergraph, Role, Side};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `side x side` grid where every vertex forms a hyperedge with its right and
/// lower neighbours, plus `extra` random hyperedges of up to 6 pins.
pub fn grid_hypergraph(side: usize, extra: usize, seed: u64) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = side * side;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let v = r * side + c;
            let mut pins = vec![v];
            if c + 1 < side {
                pins.push(v + 1);
            }
            if r + 1 < side {
                pins.push(v + side);
            }
            if pins.len() > 1 {
                edges.push(pins);
            }
        }
    }
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..extra {
        let size = rng.gen_range(2..=6);
        edges.push(all.choose_multiple(&mut rng, size).copied().collect());
    }
    let weights = edges.iter().map(|_| rng.gen_range(1..=10)).collect();
    Hypergraph::new(n, edges, Some(weights), None).expect("valid grid")
}

/// Flow problem on [`grid_hypergraph`] with the left column as source and
/// the right column as target.
pub fn grid_flow_problem(side: usize, seed: u64) -> FlowHypergraph {
    let hg = grid_hypergraph(side, 0, seed);
    let mut fh = FlowHypergraph::from_hypergraph(&hg);
    for r in 0..side {
        fh.set_role(r * side, Role::Terminal(Side::Source));
        fh.set_role(r * side + side - 1, Role::Terminal(Side::Target));
    }
    fh
}
