//! Flow problem around the cut between two blocks of a partition.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::flow_hypergraph::{FlowHypergraph, Role, Side};
use crate::hfc::HfcProblem;
use crate::hypergraph::{BlockId, EdgeId, Hypergraph, Partition, VertexId, Weight};

/// How much of each block the region-growing searches may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeConstraint {
    /// A fifth of the block's own weight.
    Fifth,
    /// `(1 + 16 eps) * ceil(total / k)` minus the weight of the opposite block.
    Relaxed,
    /// No limit: the whole pair ends up in the flow problem.
    WholePair,
}

impl SizeConstraint {
    /// Visit limits for the two blocks.
    pub fn bounds(self, hg: &Hypergraph, p: &Partition, i: BlockId, j: BlockId, epsilon: f64) -> [Weight; 2] {
        let (wi, wj) = (p.block_weight(i), p.block_weight(j));
        match self {
            SizeConstraint::Fifth => [wi / 5, wj / 5],
            SizeConstraint::Relaxed => {
                let k = p.k() as Weight;
                let per_block = (hg.total_vertex_weight() + k - 1) / k;
                let cap = ((1.0 + 16.0 * epsilon) * per_block as f64 + 1e-9).floor() as Weight;
                [(cap - wj).max(0), (cap - wi).max(0)]
            }
            SizeConstraint::WholePair => [wi, wj],
        }
    }
}

/// Flow vertex of the source super-vertex (unvisited part of block `i`).
pub const SOURCE_SUPER: usize = 0;
/// Flow vertex of the target super-vertex (unvisited part of block `j`).
pub const TARGET_SUPER: usize = 1;

#[derive(Debug, Clone)]
pub struct Extraction {
    pub blocks: [BlockId; 2],
    /// Ready to run; side limits are the global maximum block weight.
    pub problem: HfcProblem,
    /// Original vertex of each flow vertex from index 2 on.
    pub vertices: Vec<VertexId>,
    /// Unvisited vertices contracted into the two super-vertices.
    pub absorbed: [Vec<VertexId>; 2],
    /// Search layer of each flow vertex within its own block; -1 for the super-vertices.
    pub distance: Vec<i32>,
    /// Weight of the pair's cut hyperedges present in the flow problem.
    pub cut_weight: Weight,
    /// Weight of the pair's cut hyperedges that touch both super-vertices
    /// and therefore stay cut.
    pub fixed_cut_weight: Weight,
    /// Original hyperedge of each flow hyperedge.
    pub edges: Vec<EdgeId>,
}

impl Extraction {
    /// Block of every original vertex of the pair after applying a
    /// bipartition of the flow vertices (`true` = block `j`).
    pub fn assignment(&self, target_side: &[bool]) -> Vec<(VertexId, BlockId)> {
        let [i, j] = self.blocks;
        let block = |t: bool| if t { j } else { i };
        let mut out = Vec::new();
        for side in [SOURCE_SUPER, TARGET_SUPER] {
            out.extend(self.absorbed[side].iter().map(|&v| (v, block(target_side[side]))));
        }
        for (k, &v) in self.vertices.iter().enumerate() {
            out.push((v, block(target_side[k + 2])));
        }
        out
    }

    pub fn num_visited(&self) -> usize {
        self.vertices.len()
    }
}

/// Hyperedges with pins in both blocks, and their total weight.
pub fn pair_cut(hg: &Hypergraph, p: &Partition, i: BlockId, j: BlockId) -> (Vec<EdgeId>, Weight) {
    let mut edges = Vec::new();
    let mut weight = 0;
    for e in hg.edges() {
        let pins = hg.pins(e);
        if pins.iter().any(|&v| p.block(v) == i) && pins.iter().any(|&v| p.block(v) == j) {
            edges.push(e);
            weight += hg.edge_weight(e);
        }
    }
    (edges, weight)
}

/// Builds the flow problem for blocks `i` and `j`. Returns `None` if the
/// blocks share no hyperedge.
///
/// Each block is explored by a breadth-first search restricted to the block,
/// starting from its vertices on cut hyperedges, with the order inside every
/// layer shuffled. A search stops as soon as the next vertex would exceed its
/// bound; unvisited vertices are contracted into that block's super-vertex.
/// If a search visits its whole block, one vertex of its last layer becomes
/// an additional terminal so that the side keeps a non-empty terminal set.
pub fn extract_flow_problem<R: Rng + ?Sized>(
    hg: &Hypergraph,
    p: &Partition,
    i: BlockId,
    j: BlockId,
    bounds: [Weight; 2],
    max_block_weight: Weight,
    rng: &mut R,
) -> Option<Extraction> {
    assert_ne!(i, j);
    let (cut_edges, _) = pair_cut(hg, p, i, j);
    if cut_edges.is_empty() {
        return None;
    }
    let n = hg.num_vertices();
    const UNSEEN: u32 = u32::MAX;
    // Flow vertex of each original vertex of the pair, UNSEEN if absorbed.
    let mut flow_id = vec![UNSEEN; n];
    let mut vertices = Vec::new();
    let mut distance = vec![-1, -1];
    let mut extra_terminal = [None, None];
    for (side, block) in [i, j].into_iter().enumerate() {
        let mut layer: Vec<VertexId> = Vec::new();
        let mut discovered = vec![false; n];
        for &e in &cut_edges {
            for &v in hg.pins(e) {
                if p.block(v) == block && !discovered[v] {
                    discovered[v] = true;
                    layer.push(v);
                }
            }
        }
        let mut visited_weight = 0;
        let mut depth = 0;
        let mut last_layer = Vec::new();
        'search: while !layer.is_empty() {
            layer.shuffle(rng);
            let mut next = Vec::new();
            let mut taken = Vec::new();
            for &v in &layer {
                if visited_weight + hg.vertex_weight(v) > bounds[side] {
                    break 'search;
                }
                visited_weight += hg.vertex_weight(v);
                flow_id[v] = (vertices.len() + 2) as u32;
                vertices.push(v);
                distance.push(depth);
                taken.push(v);
                for &e in hg.incident_edges(v) {
                    for &u in hg.pins(e) {
                        if p.block(u) == block && !discovered[u] {
                            discovered[u] = true;
                            next.push(u);
                        }
                    }
                }
            }
            last_layer = taken;
            layer = next;
            depth += 1;
        }
        if visited_weight == p.block_weight(block) {
            extra_terminal[side] = Some(last_layer[rng.gen_range(0..last_layer.len())]);
        }
    }

    let mut absorbed = [Vec::new(), Vec::new()];
    let mut weights = vec![0; vertices.len() + 2];
    for v in hg.vertices() {
        let b = p.block(v);
        if b != i && b != j {
            continue;
        }
        if flow_id[v] == UNSEEN {
            let side = (b == j) as usize;
            absorbed[side].push(v);
            weights[side] += hg.vertex_weight(v);
        } else {
            weights[flow_id[v] as usize] = hg.vertex_weight(v);
        }
    }

    let mut flow_edges = Vec::new();
    let mut edges = Vec::new();
    let mut cut_weight = 0;
    let mut fixed_cut_weight = 0;
    let mut pins = Vec::new();
    for e in hg.edges() {
        pins.clear();
        let mut seen_super = [false, false];
        let (mut in_i, mut in_j, mut touches_visited) = (false, false, false);
        for &v in hg.pins(e) {
            let b = p.block(v);
            if b != i && b != j {
                continue;
            }
            in_i |= b == i;
            in_j |= b == j;
            if flow_id[v] == UNSEEN {
                let side = (b == j) as usize;
                if !std::mem::replace(&mut seen_super[side], true) {
                    pins.push(side);
                }
            } else {
                touches_visited = true;
                pins.push(flow_id[v] as usize);
            }
        }
        let cut = in_i && in_j;
        if seen_super[0] && seen_super[1] {
            fixed_cut_weight += hg.edge_weight(e);
            continue;
        }
        if !touches_visited || pins.len() < 2 {
            continue;
        }
        if cut {
            cut_weight += hg.edge_weight(e);
        }
        flow_edges.push((pins.clone(), hg.edge_weight(e)));
        edges.push(e);
    }

    let mut fh = FlowHypergraph::new(weights, &flow_edges);
    fh.set_role(SOURCE_SUPER, Role::Terminal(Side::Source));
    fh.set_role(TARGET_SUPER, Role::Terminal(Side::Target));
    for (side, v) in extra_terminal.iter().enumerate() {
        if let Some(v) = v {
            let s = if side == 0 { Side::Source } else { Side::Target };
            fh.set_role(flow_id[*v] as usize, Role::Terminal(s));
        }
    }
    let ratings = [0, 1].map(|side| {
        let mut r = vec![-1; fh.num_vertices()];
        for (k, &v) in vertices.iter().enumerate() {
            if (p.block(v) == j) as usize == side {
                r[k + 2] = distance[k + 2];
            }
        }
        r
    });
    Some(Extraction {
        blocks: [i, j],
        problem: HfcProblem {
            hypergraph: fh,
            max_side_weight: [max_block_weight, max_block_weight],
            piercing_rating: ratings,
            flow_bound: Some(cut_weight),
        },
        vertices,
        absorbed,
        distance,
        cut_weight,
        fixed_cut_weight,
        edges,
    })
}
