//! Dinic's algorithm with capacity scaling, run directly on a [`FlowHypergraph`].
//!
//! The layered graph is built over vertices. Each hyperedge carries two labels:
//! the level at which it was first entered at all (its sending pins become
//! reachable) and the level at which it was first entered with spare capacity
//! or reroutable flow (all of its pins become reachable). A vertex `u` on
//! level `d` only looks at hyperedges scanned from level `d`, and only at pins
//! on level `d + 1`.
//!
//! All routines take a `view`: with `Side::Target` the roles of source and
//! target are exchanged and every pin flow is negated, so augmenting from the
//! target side and computing target-reachable sets reuse the same code.

use crate::flow_hypergraph::{FlowHypergraph, Side};
use crate::hypergraph::{EdgeId, VertexId, Weight};

const UNREACHED: u32 = u32::MAX;
const DEAD: u32 = u32::MAX - 1;

/// Read-only view of the labels from the most recent search.
#[derive(Debug, Clone, Copy)]
pub struct DistanceLabels<'a> {
    vertex: &'a [u32],
    edge_any: &'a [u32],
    edge_all: &'a [u32],
}

impl DistanceLabels<'_> {
    pub fn vertex(&self, v: VertexId) -> Option<u32> {
        Some(self.vertex[v]).filter(|&d| d < DEAD)
    }

    /// Level from which `e` was first entered (sending pins reachable).
    pub fn edge_sending(&self, e: EdgeId) -> Option<u32> {
        Some(self.edge_any[e]).filter(|&d| d != UNREACHED)
    }

    /// Level from which all pins of `e` became reachable.
    pub fn edge_all_pins(&self, e: EdgeId) -> Option<u32> {
        Some(self.edge_all[e]).filter(|&d| d != UNREACHED)
    }
}

/// Vertices reachable from one terminal side in the residual hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reachability {
    pub side: Side,
    pub reached: Vec<bool>,
    pub vertices: Vec<VertexId>,
    /// Hyperedges with pins on both sides of the reachable set.
    pub cut_edges: Vec<EdgeId>,
    pub cut_weight: Weight,
    pub weight: Weight,
}

impl Reachability {
    pub fn contains(&self, v: VertexId) -> bool {
        self.reached[v]
    }
}

#[derive(Debug, Clone)]
struct PathArc {
    from: VertexId,
    u_inc: usize,
    v_inc: usize,
}

#[derive(Debug, Default, Clone)]
pub struct Dinic {
    dist: Vec<u32>,
    edge_any: Vec<u32>,
    edge_all: Vec<u32>,
    incidence_cursor: Vec<usize>,
    all_cursor: Vec<usize>,
    sending_cursor: Vec<usize>,
    /// Path position of the first arc through a hyperedge, or `usize::MAX`.
    on_path: Vec<usize>,
    queue: Vec<VertexId>,
    path: Vec<PathArc>,
    /// Breadth-first searches run so far; a work counter for callers.
    pub searches: u64,
    /// When set, every push is checked and undone on a copy.
    pub push_audit: Option<PushAudit>,
}

/// Results of checking every push of a run.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct PushAudit {
    pub pushes: u64,
    pub augmentations: u64,
    pub failures: Vec<String>,
}

impl Dinic {
    pub fn new(fh: &FlowHypergraph) -> Self {
        let n = fh.num_vertices();
        let m = fh.num_edges();
        Self {
            dist: vec![UNREACHED; n],
            edge_any: vec![UNREACHED; m],
            edge_all: vec![UNREACHED; m],
            incidence_cursor: vec![0; n],
            all_cursor: vec![0; m],
            sending_cursor: vec![0; m],
            on_path: vec![usize::MAX; m],
            queue: Vec::with_capacity(n),
            path: Vec::new(),
            searches: 0,
            push_audit: None,
        }
    }

    pub fn labels(&self) -> DistanceLabels<'_> {
        DistanceLabels {
            vertex: &self.dist,
            edge_any: &self.edge_any,
            edge_all: &self.edge_all,
        }
    }

    /// Augments from all source terminals until the flow is maximum.
    /// Returns the increase of the flow value.
    pub fn exhaust_flow(&mut self, fh: &mut FlowHypergraph) -> Weight {
        let seeds: Vec<_> = fh.terminals(Side::Source).collect();
        self.augment_from(fh, Side::Source, &seeds)
    }

    /// Restores maximality after `pierced` joined the terminals of `side`.
    ///
    /// Requires that the other terminals of `side` form a closed set in the
    /// residual hypergraph, which holds when the side was just grown to its
    /// reachable set before piercing.
    pub fn restart_from_piercing(&mut self, fh: &mut FlowHypergraph, side: Side, pierced: VertexId) -> Weight {
        debug_assert!(fh.is_terminal(pierced, side));
        self.augment_from(fh, side, &[pierced])
    }

    /// Capacity-scaling Dinic from `seeds` (terminals of `view`) towards the
    /// terminals of the other side.
    pub fn augment_from(&mut self, fh: &mut FlowHypergraph, view: Side, seeds: &[VertexId]) -> Weight {
        let mut total = 0;
        let mut scale: Weight = 1;
        while scale * 2 <= fh.max_capacity() {
            scale *= 2;
        }
        loop {
            while self.search(fh, view, seeds, scale, true) {
                let pushed = self.blocking_flow(fh, view, seeds, scale);
                if pushed == 0 {
                    assert!(scale > 1, "layered graph reaches the target but no path was found");
                    break;
                }
                total += pushed;
            }
            if scale == 1 {
                return total;
            }
            scale /= 2;
        }
    }

    /// Residual reachability from all terminals of `side`.
    pub fn compute_reachable(&mut self, fh: &FlowHypergraph, side: Side) -> Reachability {
        let seeds: Vec<_> = fh.terminals(side).collect();
        self.search(fh, side, &seeds, 1, false);
        let n = fh.num_vertices();
        let mut reached = vec![false; n];
        let mut vertices = Vec::new();
        let mut weight = 0;
        for v in 0..n {
            if self.dist[v] < DEAD {
                reached[v] = true;
                vertices.push(v);
                weight += fh.vertex_weight(v);
            }
        }
        let mut cut_edges = Vec::new();
        let mut cut_weight = 0;
        for e in 0..fh.num_edges() {
            if self.edge_any[e] == UNREACHED {
                continue;
            }
            if fh.pins(e).any(|v| !reached[v]) {
                cut_edges.push(e);
                cut_weight += fh.capacity(e);
            }
        }
        Reachability {
            side,
            reached,
            vertices,
            cut_edges,
            cut_weight,
            weight,
        }
    }

    /// Breadth-first search assigning levels. Returns whether a terminal of
    /// the other side was reached. With `stop_at_target`, vertices at or
    /// beyond the target level are not expanded.
    fn search(&mut self, fh: &FlowHypergraph, view: Side, seeds: &[VertexId], scale: Weight, stop_at_target: bool) -> bool {
        self.searches += 1;
        self.dist.fill(UNREACHED);
        self.edge_any.fill(UNREACHED);
        self.edge_all.fill(UNREACHED);
        self.queue.clear();
        for &s in seeds {
            if self.dist[s] == UNREACHED {
                self.dist[s] = 0;
                self.queue.push(s);
            }
        }
        let target = view.other();
        let mut target_level = UNREACHED;
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            let d = self.dist[u];
            if fh.is_terminal(u, target) || (stop_at_target && d + 1 > target_level) {
                continue;
            }
            for inc in fh.incidence_range(u) {
                let e = fh.incidences[inc].edge;
                let range = if fh.entry_residual(inc, view) >= scale {
                    if self.edge_all[e] != UNREACHED {
                        continue;
                    }
                    self.edge_all[e] = d;
                    if self.edge_any[e] == UNREACHED {
                        self.edge_any[e] = d;
                    }
                    fh.pin_range(e)
                } else {
                    if self.edge_any[e] != UNREACHED {
                        continue;
                    }
                    self.edge_any[e] = d;
                    fh.sending_range(e, view)
                };
                for pos in range {
                    let pin = fh.pins[pos];
                    let v = pin.vertex;
                    if self.dist[v] != UNREACHED || fh.is_terminal(v, view) {
                        continue;
                    }
                    if self.edge_all[e] != d && fh.view_flow(pin.incidence, view) < scale {
                        continue;
                    }
                    self.dist[v] = d + 1;
                    self.queue.push(v);
                    if fh.is_terminal(v, target) {
                        target_level = target_level.min(d + 1);
                    }
                }
            }
        }
        target_level != UNREACHED
    }

    fn blocking_flow(&mut self, fh: &mut FlowHypergraph, view: Side, seeds: &[VertexId], scale: Weight) -> Weight {
        for v in 0..fh.num_vertices() {
            self.incidence_cursor[v] = fh.incidence_range(v).start;
        }
        for e in 0..fh.num_edges() {
            self.all_cursor[e] = fh.pin_range(e).start;
            self.sending_cursor[e] = 0;
        }
        let target = view.other();
        let mut total = 0;
        for &s in seeds {
            if self.dist[s] != 0 {
                continue;
            }
            while let Some(bottleneck) = self.find_path(fh, view, s, target, scale) {
                for arc in &self.path {
                    match &mut self.push_audit {
                        None => fh.push_view(arc.u_inc, arc.v_inc, bottleneck, view),
                        Some(audit) => audited_push(fh, arc, bottleneck, view, audit),
                    }
                }
                if let Some(audit) = &mut self.push_audit {
                    audit.augmentations += 1;
                    if let Err(msg) = fh.audit() {
                        audit.failures.push(format!("after augmentation: {msg}"));
                    }
                }
                total += bottleneck;
                for arc in self.path.drain(..) {
                    self.on_path[fh.incidences[arc.u_inc].edge] = usize::MAX;
                }
            }
        }
        total
    }

    /// Depth-first search for one layered path from `s` to the other side.
    /// On success `self.path` holds the arcs and the bottleneck is returned.
    fn find_path(&mut self, fh: &FlowHypergraph, view: Side, s: VertexId, target: Side, scale: Weight) -> Option<Weight> {
        debug_assert!(self.path.is_empty());
        let mut u = s;
        loop {
            match self.advance(fh, view, u, scale) {
                Some((u_inc, v_inc)) => {
                    let v = fh.pins[fh.incidences[v_inc].pin_pos].vertex;
                    debug_assert_eq!(self.dist[v], self.dist[u] + 1);
                    let e = fh.incidences[u_inc].edge;
                    if self.on_path[e] == usize::MAX {
                        self.on_path[e] = self.path.len();
                    }
                    self.path.push(PathArc { from: u, u_inc, v_inc });
                    if fh.is_terminal(v, target) {
                        let bottleneck = self.bottleneck(fh, view);
                        debug_assert!(bottleneck >= scale);
                        return Some(bottleneck);
                    }
                    u = v;
                }
                None => {
                    self.dist[u] = DEAD;
                    let arc = self.path.pop()?;
                    let e = fh.incidences[arc.u_inc].edge;
                    if self.on_path[e] == self.path.len() {
                        self.on_path[e] = usize::MAX;
                    }
                    u = arc.from;
                }
            }
        }
    }

    /// Largest amount that can be pushed along `self.path`.
    ///
    /// A layered path may pass a hyperedge twice: first into a pin that
    /// sends into it, later out of a pin that receives from it. The two
    /// arcs draw on different pin flows but share the unused capacity
    /// `c - f`, so their joint limit is tighter than each residual.
    fn bottleneck(&self, fh: &FlowHypergraph, view: Side) -> Weight {
        let mut bottleneck = Weight::MAX;
        for (i, arc) in self.path.iter().enumerate() {
            let residual = fh.residual_between(arc.u_inc, arc.v_inc, view);
            bottleneck = bottleneck.min(residual);
            let e = fh.incidences[arc.u_inc].edge;
            let first = self.on_path[e];
            if first != i {
                let other = &self.path[first];
                let free = fh.capacity(e) - fh.edge_flow(e);
                let a = residual - free;
                let b = fh.residual_between(other.u_inc, other.v_inc, view) - free;
                bottleneck = bottleneck.min((a.min(b) + free).min((a + b + free).div_euclid(2)));
            }
        }
        bottleneck
    }

    /// Next admissible arc out of `u`, or `None` if `u` is exhausted.
    fn advance(&mut self, fh: &FlowHypergraph, view: Side, u: VertexId, scale: Weight) -> Option<(usize, usize)> {
        let d = self.dist[u];
        let end = fh.incidence_range(u).end;
        while self.incidence_cursor[u] < end {
            let u_inc = self.incidence_cursor[u];
            let e = fh.incidences[u_inc].edge;
            if self.edge_all[e] == d && fh.entry_residual(u_inc, view) >= scale {
                let range_end = fh.pin_range(e).end;
                while self.all_cursor[e] < range_end {
                    let pin = fh.pins[self.all_cursor[e]];
                    if self.dist[pin.vertex] == d + 1 {
                        return Some((u_inc, pin.incidence));
                    }
                    self.all_cursor[e] += 1;
                }
            }
            if self.edge_any[e] == d {
                let range = fh.sending_range(e, view);
                let mut pos = self.sending_cursor[e].max(range.start);
                while pos < range.end {
                    let pin = fh.pins[pos];
                    if self.dist[pin.vertex] == d + 1 && fh.view_flow(pin.incidence, view) >= scale {
                        self.sending_cursor[e] = pos;
                        return Some((u_inc, pin.incidence));
                    }
                    pos += 1;
                }
                self.sending_cursor[e] = pos;
            }
            self.incidence_cursor[u] += 1;
        }
        None
    }
}

fn audited_push(fh: &mut FlowHypergraph, arc: &PathArc, delta: Weight, view: Side, audit: &mut PushAudit) {
    let before = fh.clone();
    fh.push_view(arc.u_inc, arc.v_inc, delta, view);
    audit.pushes += 1;
    if let Err(msg) = fh.audit_hyperedges() {
        audit.failures.push(format!("after push: {msg}"));
    }
    let mut undo = fh.clone();
    undo.push_view(arc.v_inc, arc.u_inc, delta, view);
    if undo.flow_snapshot() != before.flow_snapshot() {
        audit.failures.push(format!("reverse push of {delta} did not restore the flow"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow_hypergraph::Role;

    fn problem(n: usize, edges: &[(&[usize], Weight)], sources: &[usize], targets: &[usize]) -> FlowHypergraph {
        let edges: Vec<_> = edges.iter().map(|(p, w)| (p.to_vec(), *w)).collect();
        let mut fh = FlowHypergraph::new(vec![1; n], &edges);
        for &s in sources {
            fh.set_role(s, Role::Terminal(Side::Source));
        }
        for &t in targets {
            fh.set_role(t, Role::Terminal(Side::Target));
        }
        fh
    }

    #[test]
    fn single_bottleneck() {
        let mut fh = problem(2, &[(&[0, 1], 7)], &[0], &[1]);
        assert_eq!(Dinic::new(&fh).exhaust_flow(&mut fh), 7);
        assert_eq!(fh.flow_value(), 7);
        fh.audit().unwrap();
    }

    #[test]
    fn series_bottleneck() {
        let mut fh = problem(3, &[(&[0, 1], 5), (&[1, 2], 3)], &[0], &[2]);
        let mut dinic = Dinic::new(&fh);
        assert_eq!(dinic.exhaust_flow(&mut fh), 3);
        fh.audit().unwrap();
        let s = dinic.compute_reachable(&fh, Side::Source);
        assert_eq!(s.vertices, vec![0, 1]);
        assert_eq!(s.cut_weight, 3);
        let t = dinic.compute_reachable(&fh, Side::Target);
        assert_eq!(t.vertices, vec![2]);
        assert_eq!(t.cut_weight, 3);
    }

    #[test]
    fn zero_flow_reaches_everything_but_targets() {
        let mut fh = problem(4, &[(&[0, 1, 2], 5), (&[2, 3], 5)], &[0], &[3]);
        let mut dinic = Dinic::new(&fh);
        let s = dinic.compute_reachable(&fh, Side::Source);
        assert_eq!(s.vertices, vec![0, 1, 2, 3]);
        fh.set_role(3, Role::Free);
        let s = dinic.compute_reachable(&fh, Side::Source);
        assert_eq!(s.vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn hyperedge_shared_by_many_paths() {
        // Two sources feed a big hyperedge of capacity 4 that fans out to the target.
        let mut fh = problem(
            6,
            &[(&[0, 2], 3), (&[1, 2], 3), (&[2, 3, 4], 4), (&[3, 5], 3), (&[4, 5], 3)],
            &[0, 1],
            &[5],
        );
        let mut dinic = Dinic::new(&fh);
        assert_eq!(dinic.exhaust_flow(&mut fh), 4);
        fh.audit().unwrap();
        assert_eq!(dinic.compute_reachable(&fh, Side::Source).cut_weight, 4);
        assert_eq!(dinic.compute_reachable(&fh, Side::Target).cut_weight, 4);
    }

    #[test]
    fn restart_after_piercing() {
        // Path 0 - 1 - 2 - 3 with capacities 2, 1, 2.
        let mut fh = problem(4, &[(&[0, 1], 2), (&[1, 2], 1), (&[2, 3], 2)], &[0], &[3]);
        let mut dinic = Dinic::new(&fh);
        assert_eq!(dinic.exhaust_flow(&mut fh), 1);
        let s = dinic.compute_reachable(&fh, Side::Source);
        for &v in &s.vertices {
            fh.set_role(v, Role::Terminal(Side::Source));
        }
        // 2 is target-reachable, so piercing it creates an augmenting path.
        fh.set_role(2, Role::Terminal(Side::Source));
        assert_eq!(dinic.restart_from_piercing(&mut fh, Side::Source, 2), 1);
        assert_eq!(fh.flow_value(), 2);
        fh.audit().unwrap();
    }

    #[test]
    fn augment_from_target_side() {
        let mut fh = problem(3, &[(&[0, 1], 5), (&[1, 2], 3)], &[0], &[2]);
        let mut dinic = Dinic::new(&fh);
        let seeds: Vec<_> = fh.terminals(Side::Target).collect();
        assert_eq!(dinic.augment_from(&mut fh, Side::Target, &seeds), 3);
        assert_eq!(fh.flow_value(), 3);
        fh.audit().unwrap();
    }

    #[test]
    fn labels_describe_the_last_search() {
        let mut fh = problem(3, &[(&[0, 1], 5), (&[1, 2], 3)], &[0], &[2]);
        let mut dinic = Dinic::new(&fh);
        dinic.exhaust_flow(&mut fh);
        dinic.compute_reachable(&fh, Side::Source);
        let labels = dinic.labels();
        assert_eq!(labels.vertex(0), Some(0));
        assert_eq!(labels.vertex(1), Some(1));
        assert_eq!(labels.vertex(2), None);
        assert_eq!(labels.edge_all_pins(0), Some(0));
        // Saturated and nothing to reroute from 1: only sending pins qualify.
        assert_eq!(labels.edge_sending(1), Some(1));
        assert_eq!(labels.edge_all_pins(1), None);
    }
}
