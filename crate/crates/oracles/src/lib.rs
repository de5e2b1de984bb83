//! Slow, obviously-correct reference implementations for cross-checking
//! `hfc-core`. Nothing here shares code paths with the production solver.

use std::collections::{BTreeSet, VecDeque};

use hfc_core::{max_block_weight, FlowHypergraph, Hypergraph, Role, Side, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Finite(Weight),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Bridge,
    External,
    Terminal,
}

#[derive(Debug, Clone)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
    pub kind: ArcKind,
    flow: Weight,
}

impl Arc {
    fn residual(&self) -> Capacity {
        match self.capacity {
            Capacity::Finite(c) => Capacity::Finite(c - self.flow),
            Capacity::Unbounded => Capacity::Unbounded,
        }
    }
}

/// Directed graph with a residual twin for every arc (arc `2i` forward, `2i + 1` backward).
#[derive(Debug, Clone)]
pub struct LawlerNetwork {
    pub num_vertices: usize,
    pub num_nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
    adjacency: Vec<Vec<usize>>,
}

impl LawlerNetwork {
    /// Node `v` for each vertex, `n + 2e` / `n + 2e + 1` for the in- and
    /// out-node of hyperedge `e`, followed by a super source and super sink
    /// attached to the terminals.
    pub fn build(fh: &FlowHypergraph) -> Self {
        let n = fh.num_vertices();
        let m = fh.num_edges();
        let source = n + 2 * m;
        let sink = source + 1;
        let mut net = LawlerNetwork {
            num_vertices: n,
            num_nodes: sink + 1,
            source,
            sink,
            arcs: Vec::new(),
            adjacency: vec![Vec::new(); sink + 1],
        };
        for e in 0..m {
            let (e_in, e_out) = (n + 2 * e, n + 2 * e + 1);
            net.add_arc(e_in, e_out, Capacity::Finite(fh.capacity(e)), ArcKind::Bridge);
            for v in fh.pins(e) {
                net.add_arc(v, e_in, Capacity::Unbounded, ArcKind::External);
                net.add_arc(e_out, v, Capacity::Unbounded, ArcKind::External);
            }
        }
        for v in 0..n {
            match fh.role(v) {
                Role::Terminal(Side::Source) => net.add_arc(source, v, Capacity::Unbounded, ArcKind::Terminal),
                Role::Terminal(Side::Target) => net.add_arc(v, sink, Capacity::Unbounded, ArcKind::Terminal),
                Role::Free => {}
            }
        }
        net
    }

    fn add_arc(&mut self, from: usize, to: usize, capacity: Capacity, kind: ArcKind) {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            from,
            to,
            capacity,
            kind,
            flow: 0,
        });
        self.arcs.push(Arc {
            from: to,
            to: from,
            capacity: Capacity::Finite(0),
            kind,
            flow: 0,
        });
        self.adjacency[from].push(id);
        self.adjacency[to].push(id + 1);
    }

    /// Arcs of the network proper (excluding residual twins and terminal arcs).
    pub fn hypergraph_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs
            .iter()
            .step_by(2)
            .filter(|a| a.kind != ArcKind::Terminal)
    }

    fn has_residual(&self, arc: usize) -> bool {
        match self.arcs[arc].residual() {
            Capacity::Finite(r) => r > 0,
            Capacity::Unbounded => true,
        }
    }

    /// Breadth-first search for a shortest augmenting path; returns the
    /// predecessor arcs if the sink is reachable.
    fn shortest_path(&self) -> Option<Vec<usize>> {
        let mut pred = vec![usize::MAX; self.num_nodes];
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(x) = queue.pop_front() {
            for &a in &self.adjacency[x] {
                let y = self.arcs[a].to;
                if !seen[y] && self.has_residual(a) {
                    seen[y] = true;
                    pred[y] = a;
                    if y == self.sink {
                        let mut path = Vec::new();
                        let mut z = y;
                        while z != self.source {
                            path.push(pred[z]);
                            z = self.arcs[pred[z]].from;
                        }
                        return Some(path);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Maximum flow by shortest augmenting paths. Panics if the flow is
    /// unbounded (a terminal-to-terminal path of external arcs only).
    pub fn max_flow(&mut self) -> Weight {
        let mut total = 0;
        while let Some(path) = self.shortest_path() {
            let bottleneck = path
                .iter()
                .filter_map(|&a| match self.arcs[a].residual() {
                    Capacity::Finite(r) => Some(r),
                    Capacity::Unbounded => None,
                })
                .min()
                .expect("augmenting path of unbounded capacity");
            for &a in &path {
                self.arcs[a].flow += bottleneck;
                self.arcs[a ^ 1].flow -= bottleneck;
            }
            total += bottleneck;
        }
        total
    }

    pub fn has_augmenting_path(&self) -> bool {
        self.shortest_path().is_some()
    }

    /// Nodes reachable from the super source in the residual network.
    pub fn source_reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(x) = queue.pop_front() {
            for &a in &self.adjacency[x] {
                let y = self.arcs[a].to;
                if !seen[y] && self.has_residual(a) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Nodes from which the super sink is reachable in the residual network.
    pub fn target_reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([self.sink]);
        seen[self.sink] = true;
        while let Some(y) = queue.pop_front() {
            for &a in &self.adjacency[y] {
                // `a` leaves y; its twin enters y.
                let twin = a ^ 1;
                let x = self.arcs[twin].from;
                if !seen[x] && self.has_residual(twin) {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        seen
    }

    /// Arcs leaving the source-reachable set; at a maximum flow these form a minimum cut.
    pub fn min_cut_arcs(&self) -> Vec<&Arc> {
        let reach = self.source_reachable();
        self.arcs
            .iter()
            .step_by(2)
            .filter(|a| reach[a.from] && !reach[a.to])
            .collect()
    }
}

/// Convenience: maximum flow value of `fh`'s terminals via the Lawler network.
pub fn lawler_max_flow(fh: &FlowHypergraph) -> Weight {
    LawlerNetwork::build(fh).max_flow()
}

/// Vertex-level source/target reachable sets at a maximum flow.
pub fn lawler_cutsides(fh: &FlowHypergraph) -> (Weight, Vec<bool>, Vec<bool>) {
    let mut net = LawlerNetwork::build(fh);
    let flow = net.max_flow();
    let n = fh.num_vertices();
    let s = net.source_reachable()[..n].to_vec();
    let t = net.target_reachable()[..n].to_vec();
    (flow, s, t)
}

/// Connectivity metric of a block assignment, counted with ordered sets.
pub fn connectivity(hg: &Hypergraph, assignment: &[usize]) -> Weight {
    hg.edges()
        .map(|e| {
            let blocks: BTreeSet<usize> = hg.pins(e).iter().map(|&v| assignment[v]).collect();
            hg.edge_weight(e) * (blocks.len() as Weight - 1)
        })
        .sum()
}

/// Optimal connectivity over all epsilon-balanced bisections.
pub fn brute_force_bisection(hg: &Hypergraph, epsilon: f64) -> Option<Weight> {
    let n = hg.num_vertices();
    assert!(n <= 20, "brute force limited to 20 vertices");
    let limit = max_block_weight(hg.total_vertex_weight(), 2, epsilon);
    let mut best: Option<Weight> = None;
    // Fix vertex 0 in block 0 to halve the search.
    for mask in 0u32..(1 << n.saturating_sub(1)) {
        let assignment: Vec<usize> = (0..n)
            .map(|v| if v == 0 { 0 } else { ((mask >> (v - 1)) & 1) as usize })
            .collect();
        let w1: Weight = (0..n).filter(|&v| assignment[v] == 1).map(|v| hg.vertex_weight(v)).sum();
        let w0 = hg.total_vertex_weight() - w1;
        if w1 == 0 || w0 > limit || w1 > limit {
            continue;
        }
        let cut = connectivity(hg, &assignment);
        best = Some(best.map_or(cut, |b| b.min(cut)));
    }
    best
}

/// Every achievable subset sum of `weights`.
pub fn brute_force_subset_sum(weights: &[Weight]) -> BTreeSet<Weight> {
    assert!(weights.len() <= 15, "brute force limited to 15 weights");
    (0u32..(1 << weights.len()))
        .map(|mask| {
            weights
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, w)| w)
                .sum()
        })
        .collect()
}

/// Maximal runs of consecutive integers in `sums`.
pub fn ranges_of(sums: &BTreeSet<Weight>) -> Vec<(Weight, Weight)> {
    let mut out: Vec<(Weight, Weight)> = Vec::new();
    for &x in sums {
        match out.last_mut() {
            Some((_, hi)) if *hi + 1 == x => *hi = x,
            _ => out.push((x, x)),
        }
    }
    out
}

/// Cut weight of a bipartition of a flow hypergraph (`true` = target side).
pub fn bipartition_cut(fh: &FlowHypergraph, target_side: &[bool]) -> Weight {
    (0..fh.num_edges())
        .filter(|&e| {
            let mut pins = fh.pins(e);
            let first = target_side[pins.next().unwrap()];
            pins.any(|v| target_side[v] != first)
        })
        .map(|e| fh.capacity(e))
        .sum()
}

/// All bipartitions that keep the terminals on their sides and cut exactly
/// the minimum weight. Returns `(min cut, list of target-side flags)`.
pub fn all_min_cuts(fh: &FlowHypergraph) -> (Weight, Vec<Vec<bool>>) {
    let n = fh.num_vertices();
    assert!(n <= 20, "brute force limited to 20 vertices");
    let free: Vec<usize> = (0..n).filter(|&v| fh.role(v) == Role::Free).collect();
    let mut best = Weight::MAX;
    let mut cuts = Vec::new();
    for mask in 0u32..(1 << free.len()) {
        let mut target_side: Vec<bool> = (0..n).map(|v| fh.is_terminal(v, Side::Target)).collect();
        for (i, &v) in free.iter().enumerate() {
            target_side[v] = (mask >> i) & 1 == 1;
        }
        let cut = bipartition_cut(fh, &target_side);
        if cut < best {
            best = cut;
            cuts.clear();
        }
        if cut == best {
            cuts.push(target_side);
        }
    }
    (best, cuts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lawler_counts() {
        let fh = FlowHypergraph::new(vec![1; 3], &[(vec![0, 1, 2], 4)]);
        let net = LawlerNetwork::build(&fh);
        assert_eq!(net.num_nodes - 2, 5);
        let arcs: Vec<_> = net.hypergraph_arcs().collect();
        assert_eq!(arcs.iter().filter(|a| a.kind == ArcKind::Bridge).count(), 1);
        assert_eq!(arcs.iter().filter(|a| a.kind == ArcKind::External).count(), 6);
    }

    #[test]
    fn min_cut_uses_only_bridges() {
        let mut fh = FlowHypergraph::new(vec![1; 4], &[(vec![0, 1], 3), (vec![1, 2, 3], 2), (vec![0, 3], 1)]);
        fh.set_role(0, Role::Terminal(Side::Source));
        fh.set_role(2, Role::Terminal(Side::Target));
        let mut net = LawlerNetwork::build(&fh);
        assert_eq!(net.max_flow(), 2);
        assert!(net.min_cut_arcs().iter().all(|a| a.kind == ArcKind::Bridge));
    }

    #[test]
    fn bisection_examples() {
        let two_cliques = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]], None, None).unwrap();
        assert_eq!(brute_force_bisection(&two_cliques, 0.0), Some(0));
        let path = Hypergraph::new(6, (0..5).map(|i| vec![i, i + 1]).collect(), None, None).unwrap();
        assert_eq!(brute_force_bisection(&path, 0.0), Some(1));
    }

    #[test]
    fn subset_sums() {
        assert_eq!(brute_force_subset_sum(&[3, 5]), BTreeSet::from([0, 3, 5, 8]));
        assert_eq!(brute_force_subset_sum(&[]), BTreeSet::from([0]));
        assert_eq!(ranges_of(&brute_force_subset_sum(&[1, 2])), vec![(0, 3)]);
    }
}
