//! Simple initial partitions by recursive bisection with randomized
//! breadth-first region growing.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::hypergraph::{max_block_weight, BlockId, Hypergraph, Partition, VertexId, Weight};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InitialPartitionError {
    #[error("k must be at least 2, got {0}")]
    TooFewBlocks(usize),
    #[error("cannot split {vertices} vertices into {k} non-empty blocks")]
    TooManyBlocks { k: usize, vertices: usize },
}

/// Splits `hg` into `k` blocks. Each bisection grows one side from a random
/// vertex until it reaches its share of the weight, then recurses. Blocks
/// heavier than `max_block_weight(total, k, 0)` are then relieved by
/// [`rebalance`].
pub fn greedy_initial_partition<R: Rng + ?Sized>(
    hg: &Hypergraph,
    k: usize,
    rng: &mut R,
) -> Result<Partition, InitialPartitionError> {
    if k < 2 {
        return Err(InitialPartitionError::TooFewBlocks(k));
    }
    let n = hg.num_vertices();
    if k > n {
        return Err(InitialPartitionError::TooManyBlocks { k, vertices: n });
    }
    let mut assignment = vec![0; n];
    let all: Vec<VertexId> = hg.vertices().collect();
    split(hg, &all, 0, k, &mut assignment, rng);
    let mut p = Partition::new(hg, k, assignment).expect("every block receives a vertex");
    rebalance(hg, &mut p, max_block_weight(hg.total_vertex_weight(), k, 0.0));
    Ok(p)
}

/// Moves vertices out of blocks heavier than `limit` into blocks where they
/// fit, choosing the move with the smallest connectivity increase. Stops when
/// all blocks fit or no move fits. Never empties a block.
pub fn rebalance(hg: &Hypergraph, p: &mut Partition, limit: Weight) {
    let k = p.k();
    let mut count = vec![0usize; k];
    while let Some(from) = (0..k).find(|&b| p.block_weight(b) > limit) {
        let mut best: Option<(Weight, VertexId, BlockId)> = None;
        let members: Vec<VertexId> = hg.vertices().filter(|&v| p.block(v) == from).collect();
        if members.len() < 2 {
            return;
        }
        for &v in &members {
            let w = hg.vertex_weight(v);
            for to in (0..k).filter(|&b| b != from && p.block_weight(b) + w <= limit) {
                let mut delta = 0;
                for &e in hg.incident_edges(v) {
                    count.iter_mut().for_each(|c| *c = 0);
                    for &u in hg.pins(e) {
                        count[p.block(u)] += 1;
                    }
                    delta += hg.edge_weight(e) * ((count[to] == 0) as Weight - (count[from] == 1) as Weight);
                }
                if best.map_or(true, |(d, _, _)| delta < d) {
                    best = Some((delta, v, to));
                }
            }
        }
        let Some((_, v, to)) = best else { return };
        p.move_vertex(hg, v, to);
    }
}

fn split<R: Rng + ?Sized>(
    hg: &Hypergraph,
    vertices: &[VertexId],
    first_block: BlockId,
    k: usize,
    assignment: &mut [BlockId],
    rng: &mut R,
) {
    if k == 1 {
        for &v in vertices {
            assignment[v] = first_block;
        }
        return;
    }
    let k0 = k / 2;
    let total: Weight = vertices.iter().map(|&v| hg.vertex_weight(v)).sum();
    let target = (total * k0 as Weight + k as Weight - 1) / k as Weight;
    let (grown, rest) = grow(hg, vertices, target, k0, k - k0, rng);
    split(hg, &grown, first_block, k0, assignment, rng);
    split(hg, &rest, first_block + k0, k - k0, assignment, rng);
}

/// Grows a region of weight at most `target` inside `vertices`, keeping at
/// least `min_in` vertices inside and `min_out` outside.
fn grow<R: Rng + ?Sized>(
    hg: &Hypergraph,
    vertices: &[VertexId],
    target: Weight,
    min_in: usize,
    min_out: usize,
    rng: &mut R,
) -> (Vec<VertexId>, Vec<VertexId>) {
    let n = hg.num_vertices();
    let mut member = vec![false; n];
    for &v in vertices {
        member[v] = true;
    }
    let mut taken = vec![false; n];
    let mut discovered = vec![false; n];
    let mut order = vertices.to_vec();
    order.shuffle(rng);
    let mut region = Vec::new();
    let mut weight = 0;
    let mut queue = std::collections::VecDeque::new();
    let max_in = vertices.len() - min_out;
    for &start in &order {
        if discovered[start] {
            continue;
        }
        discovered[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            if region.len() == max_in || weight >= target {
                break;
            }
            if weight + hg.vertex_weight(v) > target && region.len() >= min_in {
                continue;
            }
            taken[v] = true;
            weight += hg.vertex_weight(v);
            region.push(v);
            let mut next: Vec<VertexId> = hg
                .incident_edges(v)
                .iter()
                .flat_map(|&e| hg.pins(e).iter().copied())
                .filter(|&u| member[u] && !discovered[u])
                .collect();
            next.sort_unstable();
            next.dedup();
            next.shuffle(rng);
            for u in next {
                discovered[u] = true;
                queue.push_back(u);
            }
        }
        queue.clear();
        if region.len() == max_in || weight >= target {
            break;
        }
    }
    // Heavy vertices may have been skipped everywhere; top up by count.
    for &v in &order {
        if region.len() >= min_in {
            break;
        }
        if !taken[v] {
            taken[v] = true;
            region.push(v);
        }
    }
    let rest = vertices.iter().copied().filter(|&v| !taken[v]).collect();
    (region, rest)
}
