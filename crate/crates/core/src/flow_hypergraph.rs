//! Flow state stored directly on a weighted hypergraph.
//!
//! Every pin `(u, e)` carries the net amount `u` sends into `e` (negative when
//! `u` receives from `e`), and every hyperedge carries its flow `f(e)`, bounded
//! by its capacity. The pins of each hyperedge are kept in three contiguous
//! subranges ordered by the sign of their pin flow: receiving, neutral, sending.
//!
//! The solver may look at the state from either terminal. Viewed from the
//! target side all pin flows are negated, which turns target-reachability into
//! source-reachability and lets one augmenting routine serve both sides.

use crate::hypergraph::{EdgeId, Hypergraph, VertexId, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Source,
    Target,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Source => Side::Target,
            Side::Target => Side::Source,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    fn sign(self) -> Weight {
        match self {
            Side::Source => 1,
            Side::Target => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Free,
    Terminal(Side),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Incidence {
    pub(crate) edge: EdgeId,
    pub(crate) pin_pos: usize,
    pub(crate) flow: Weight,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Pin {
    pub(crate) vertex: VertexId,
    pub(crate) incidence: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EdgeState {
    first_pin: usize,
    first_neutral: usize,
    first_sending: usize,
    end: usize,
    capacity: Weight,
    flow: Weight,
}

#[derive(Debug, Clone)]
pub struct FlowHypergraph {
    vertex_weights: Vec<Weight>,
    vertex_offsets: Vec<usize>,
    pub(crate) incidences: Vec<Incidence>,
    edges: Vec<EdgeState>,
    pub(crate) pins: Vec<Pin>,
    roles: Vec<Role>,
    max_capacity: Weight,
}

impl FlowHypergraph {
    /// `edges` holds `(pins, capacity)` pairs. Pins must be distinct within a
    /// hyperedge and capacities positive.
    pub fn new(vertex_weights: Vec<Weight>, edges: &[(Vec<VertexId>, Weight)]) -> Self {
        let n = vertex_weights.len();
        let mut degree = vec![0usize; n];
        for (pins, capacity) in edges {
            assert!(*capacity > 0, "hyperedge capacities must be positive");
            for &v in pins {
                degree[v] += 1;
            }
        }
        let mut vertex_offsets = Vec::with_capacity(n + 1);
        vertex_offsets.push(0);
        for d in &degree {
            vertex_offsets.push(vertex_offsets.last().unwrap() + d);
        }
        let num_pins = *vertex_offsets.last().unwrap();
        let mut fill = vertex_offsets[..n].to_vec();
        let mut incidences = vec![
            Incidence {
                edge: 0,
                pin_pos: 0,
                flow: 0
            };
            num_pins
        ];
        let mut pin_list = Vec::with_capacity(num_pins);
        let mut edge_states = Vec::with_capacity(edges.len());
        let mut max_capacity = 0;
        for (e, (pins, capacity)) in edges.iter().enumerate() {
            let first_pin = pin_list.len();
            for &v in pins {
                let inc = fill[v];
                fill[v] += 1;
                debug_assert!(
                    incidences[vertex_offsets[v]..inc].iter().all(|i| i.edge != e),
                    "duplicate pin {v} in hyperedge {e}"
                );
                incidences[inc] = Incidence {
                    edge: e,
                    pin_pos: pin_list.len(),
                    flow: 0,
                };
                pin_list.push(Pin { vertex: v, incidence: inc });
            }
            let end = pin_list.len();
            edge_states.push(EdgeState {
                first_pin,
                first_neutral: first_pin,
                first_sending: end,
                end,
                capacity: *capacity,
                flow: 0,
            });
            max_capacity = max_capacity.max(*capacity);
        }
        Self {
            roles: vec![Role::Free; n],
            vertex_weights,
            vertex_offsets,
            incidences,
            edges: edge_states,
            pins: pin_list,
            max_capacity,
        }
    }

    /// The whole hypergraph as a flow problem, with no terminals set.
    pub fn from_hypergraph(hg: &Hypergraph) -> Self {
        let edges: Vec<_> = hg
            .edges()
            .map(|e| (hg.pins(e).to_vec(), hg.edge_weight(e)))
            .collect();
        Self::new(hg.vertex_weights().to_vec(), &edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_pins(&self) -> usize {
        self.pins.len()
    }

    pub fn vertex_weight(&self, v: VertexId) -> Weight {
        self.vertex_weights[v]
    }

    pub fn total_weight(&self) -> Weight {
        self.vertex_weights.iter().sum()
    }

    pub fn capacity(&self, e: EdgeId) -> Weight {
        self.edges[e].capacity
    }

    pub fn max_capacity(&self) -> Weight {
        self.max_capacity
    }

    pub fn edge_flow(&self, e: EdgeId) -> Weight {
        self.edges[e].flow
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_offsets[v + 1] - self.vertex_offsets[v]
    }

    pub fn edge_size(&self, e: EdgeId) -> usize {
        self.edges[e].end - self.edges[e].first_pin
    }

    /// Pins of `e` in subrange order (receiving, neutral, sending).
    pub fn pins(&self, e: EdgeId) -> impl Iterator<Item = VertexId> + '_ {
        let s = &self.edges[e];
        self.pins[s.first_pin..s.end].iter().map(|p| p.vertex)
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.incidence_range(v).map(|i| self.incidences[i].edge)
    }

    pub(crate) fn incidence_range(&self, v: VertexId) -> std::ops::Range<usize> {
        self.vertex_offsets[v]..self.vertex_offsets[v + 1]
    }

    pub(crate) fn pin_range(&self, e: EdgeId) -> std::ops::Range<usize> {
        self.edges[e].first_pin..self.edges[e].end
    }

    /// Pins that send flow into `e` as seen from `view`.
    pub(crate) fn sending_range(&self, e: EdgeId, view: Side) -> std::ops::Range<usize> {
        let s = &self.edges[e];
        match view {
            Side::Source => s.first_sending..s.end,
            Side::Target => s.first_pin..s.first_neutral,
        }
    }

    pub fn role(&self, v: VertexId) -> Role {
        self.roles[v]
    }

    pub fn is_terminal(&self, v: VertexId, side: Side) -> bool {
        self.roles[v] == Role::Terminal(side)
    }

    pub fn set_role(&mut self, v: VertexId, role: Role) {
        self.roles[v] = role;
    }

    pub fn terminals(&self, side: Side) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.num_vertices()).filter(move |&v| self.is_terminal(v, side))
    }

    fn incidence_of(&self, v: VertexId, e: EdgeId) -> usize {
        self.incidence_range(v)
            .find(|&i| self.incidences[i].edge == e)
            .unwrap_or_else(|| panic!("vertex {v} is not a pin of hyperedge {e}"))
    }

    /// Net flow `v` sends into `e`.
    pub fn pin_flow(&self, v: VertexId, e: EdgeId) -> Weight {
        self.incidences[self.incidence_of(v, e)].flow
    }

    #[inline]
    pub(crate) fn view_flow(&self, inc: usize, view: Side) -> Weight {
        view.sign() * self.incidences[inc].flow
    }

    /// `c(e) - f(e)` plus the flow `u` currently receives from `e`, as seen from `view`.
    #[inline]
    pub(crate) fn entry_residual(&self, u_inc: usize, view: Side) -> Weight {
        let s = &self.edges[self.incidences[u_inc].edge];
        s.capacity - s.flow + (-self.view_flow(u_inc, view)).max(0)
    }

    #[inline]
    pub(crate) fn residual_between(&self, u_inc: usize, v_inc: usize, view: Side) -> Weight {
        self.entry_residual(u_inc, view) + self.view_flow(v_inc, view).max(0)
    }

    /// Largest amount that can be pushed from `u` through `e` to `v`:
    /// `c(e) - f(e) + received(u, e) + sent(v, e)`.
    pub fn residual_capacity(&self, u: VertexId, e: EdgeId, v: VertexId) -> Weight {
        assert_ne!(u, v);
        self.residual_between(self.incidence_of(u, e), self.incidence_of(v, e), Side::Source)
    }

    /// Pins of `e` that can receive flow pushed in from `u`. When the
    /// hyperedge is saturated and `u` holds no received flow to reroute, only
    /// the sending pins qualify.
    pub fn scan_pins(&self, e: EdgeId, u: VertexId) -> Vec<VertexId> {
        let u_inc = self.incidence_of(u, e);
        let range = if self.entry_residual(u_inc, Side::Source) > 0 {
            self.pin_range(e)
        } else {
            self.sending_range(e, Side::Source)
        };
        self.pins[range]
            .iter()
            .map(|p| p.vertex)
            .filter(|&v| v != u)
            .collect()
    }

    /// Pushes `delta` from `u` through `e` to `v`.
    pub fn push(&mut self, u: VertexId, e: EdgeId, v: VertexId, delta: Weight) {
        assert_ne!(u, v);
        let u_inc = self.incidence_of(u, e);
        let v_inc = self.incidence_of(v, e);
        self.push_view(u_inc, v_inc, delta, Side::Source);
    }

    pub(crate) fn push_view(&mut self, u_inc: usize, v_inc: usize, delta: Weight, view: Side) {
        match view {
            Side::Source => self.push_raw(u_inc, v_inc, delta),
            Side::Target => self.push_raw(v_inc, u_inc, delta),
        }
    }

    /// Routes `delta` along the four residual paths through the in- and
    /// out-node of `e`, in the order that keeps `f(e)` minimal.
    fn push_raw(&mut self, u_inc: usize, v_inc: usize, delta: Weight) {
        let e = self.incidences[u_inc].edge;
        debug_assert_eq!(e, self.incidences[v_inc].edge);
        assert!(delta > 0, "push of non-positive amount {delta}");
        assert!(
            delta <= self.residual_between(u_inc, v_inc, Side::Source),
            "push of {delta} exceeds residual capacity"
        );
        let old_u = self.incidences[u_inc].flow;
        let old_v = self.incidences[v_inc].flow;
        let (mut fu, mut fv) = (old_u, old_v);
        let mut flow = self.edges[e].flow;
        let mut rest = delta;

        // u <- e_o <- e_i <- v: cancel flow through the bridge.
        let step = rest.min((-fu).max(0)).min(fv.max(0));
        flow -= step;
        fu += step;
        fv -= step;
        rest -= step;
        // u <- e_o -> v: reroute flow u received.
        let step = rest.min((-fu).max(0));
        fu += step;
        fv -= step;
        rest -= step;
        // u -> e_i <- v: reroute flow v sent.
        let step = rest.min(fv.max(0));
        fu += step;
        fv -= step;
        rest -= step;
        // u -> e_i -> e_o -> v: new flow over the bridge.
        flow += rest;
        fu += rest;
        fv -= rest;

        debug_assert!(flow <= self.edges[e].capacity);
        self.edges[e].flow = flow;
        self.incidences[u_inc].flow = fu;
        self.incidences[v_inc].flow = fv;
        self.reposition(u_inc, old_u, fu);
        self.reposition(v_inc, old_v, fv);
    }

    fn swap_pins(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.pins.swap(a, b);
        let ia = self.pins[a].incidence;
        let ib = self.pins[b].incidence;
        self.incidences[ia].pin_pos = a;
        self.incidences[ib].pin_pos = b;
    }

    /// Moves the pin of `inc` into the subrange matching the sign of its new flow.
    fn reposition(&mut self, inc: usize, old: Weight, new: Weight) {
        let class = |x: Weight| x.signum() + 1;
        let (mut from, to) = (class(old), class(new));
        let e = self.incidences[inc].edge;
        while from != to {
            let pos = self.incidences[inc].pin_pos;
            match (from, from < to) {
                (0, true) => {
                    let target = self.edges[e].first_neutral - 1;
                    self.swap_pins(pos, target);
                    self.edges[e].first_neutral -= 1;
                    from = 1;
                }
                (1, true) => {
                    let target = self.edges[e].first_sending - 1;
                    self.swap_pins(pos, target);
                    self.edges[e].first_sending -= 1;
                    from = 2;
                }
                (2, false) => {
                    let target = self.edges[e].first_sending;
                    self.swap_pins(pos, target);
                    self.edges[e].first_sending += 1;
                    from = 1;
                }
                (1, false) => {
                    let target = self.edges[e].first_neutral;
                    self.swap_pins(pos, target);
                    self.edges[e].first_neutral += 1;
                    from = 0;
                }
                _ => unreachable!(),
            }
        }
    }

    /// Net flow leaving the terminals of `side` (the flow value for `Source`).
    pub fn terminal_excess(&self, side: Side) -> Weight {
        self.terminals(side)
            .flat_map(|v| self.incidence_range(v))
            .map(|i| self.view_flow(i, side))
            .sum()
    }

    pub fn flow_value(&self) -> Weight {
        self.terminal_excess(Side::Source)
    }

    /// Removes all flow.
    pub fn reset_flow(&mut self) {
        for inc in &mut self.incidences {
            inc.flow = 0;
        }
        for s in &mut self.edges {
            s.flow = 0;
            s.first_neutral = s.first_pin;
            s.first_sending = s.end;
        }
    }

    /// Full consistency check of the flow and the pin subranges.
    pub fn audit(&self) -> Result<(), String> {
        self.audit_hyperedges()?;
        for v in 0..self.num_vertices() {
            if self.roles[v] != Role::Free {
                continue;
            }
            let net: Weight = self.incidence_range(v).map(|i| self.incidences[i].flow).sum();
            if net != 0 {
                return Err(format!("vertex {v}: conservation violated, net outflow {net}"));
            }
        }
        Ok(())
    }

    /// Per-hyperedge part of [`audit`](Self::audit): bounds, `f(e)` equal to
    /// both pin flow sums, and pin subranges. Holds after every single push.
    pub fn audit_hyperedges(&self) -> Result<(), String> {
        for (e, s) in self.edges.iter().enumerate() {
            if s.flow < 0 || s.flow > s.capacity {
                return Err(format!("hyperedge {e}: flow {} outside [0, {}]", s.flow, s.capacity));
            }
            let (mut sent, mut received) = (0, 0);
            for pos in s.first_pin..s.end {
                let pin = self.pins[pos];
                let inc = self.incidences[pin.incidence];
                if inc.edge != e || inc.pin_pos != pos {
                    return Err(format!("hyperedge {e}: broken pin/incidence link at {pos}"));
                }
                let expected_class = if pos < s.first_neutral {
                    -1
                } else if pos < s.first_sending {
                    0
                } else {
                    1
                };
                if inc.flow.signum() != expected_class {
                    return Err(format!(
                        "hyperedge {e}: pin {} with flow {} sits in the wrong subrange",
                        pin.vertex, inc.flow
                    ));
                }
                sent += inc.flow.max(0);
                received += (-inc.flow).max(0);
            }
            if sent != s.flow || received != s.flow {
                return Err(format!(
                    "hyperedge {e}: f(e) = {}, sent {sent}, received {received}",
                    s.flow
                ));
            }
        }
        Ok(())
    }

    /// Snapshot of all flow values, for bit-exact comparisons in tests.
    pub fn flow_snapshot(&self) -> (Vec<Weight>, Vec<Weight>) {
        (
            self.edges.iter().map(|s| s.flow).collect(),
            self.incidences.iter().map(|i| i.flow).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_edge(capacity: Weight, pins: usize) -> FlowHypergraph {
        FlowHypergraph::new(vec![1; pins], &[((0..pins).collect(), capacity)])
    }

    #[test]
    fn residual_examples() {
        let fh = single_edge(10, 2);
        assert_eq!(fh.residual_capacity(0, 0, 1), 10);
        let fh = state(10, &[-4, 6, 4, -6]);
        assert_eq!(fh.edge_flow(0), 10);
        assert_eq!(fh.residual_capacity(0, 0, 1), 10);
        let fh = state(10, &[0, 0, 10, -10]);
        assert_eq!(fh.residual_capacity(0, 0, 1), 0);
    }

    /// Builds a single hyperedge whose pins hold exactly `flows` (summing to 0).
    fn state(capacity: Weight, flows: &[Weight]) -> FlowHypergraph {
        assert_eq!(flows.iter().sum::<Weight>(), 0);
        let mut fh = single_edge(capacity, flows.len());
        let mut senders: Vec<(usize, Weight)> =
            flows.iter().enumerate().filter(|(_, &f)| f > 0).map(|(i, &f)| (i, f)).collect();
        for (r, &f) in flows.iter().enumerate().filter(|(_, &f)| f < 0) {
            let mut need = -f;
            for (s, left) in senders.iter_mut() {
                let x = need.min(*left);
                if x > 0 {
                    fh.push(*s, 0, r, x);
                    *left -= x;
                    need -= x;
                }
            }
        }
        for (i, &f) in flows.iter().enumerate() {
            assert_eq!(fh.pin_flow(i, 0), f);
        }
        fh
    }

    #[test]
    fn push_on_fresh_hyperedge_uses_the_bridge() {
        let mut fh = single_edge(10, 2);
        fh.push(0, 0, 1, 5);
        assert_eq!(fh.edge_flow(0), 5);
        assert_eq!(fh.pin_flow(0, 0), 5);
        assert_eq!(fh.pin_flow(1, 0), -5);
    }

    #[test]
    fn four_step_trace() {
        // Pushing 10 from u = 0 to v = 1: 4 cancel over the bridge, 2 reroute
        // v's sent flow, 4 go over the bridge again.
        let mut fh = state(10, &[-4, 6, 4, -6]);
        assert_eq!(fh.edge_flow(0), 10);
        assert_eq!(fh.residual_capacity(0, 0, 1), 10);
        fh.push(0, 0, 1, 10);
        assert_eq!(fh.edge_flow(0), 10);
        assert_eq!(fh.pin_flow(0, 0), 6);
        assert_eq!(fh.pin_flow(1, 0), -4);
        for v in 0..4 {
            fh.set_role(v, Role::Terminal(Side::Source));
        }
        fh.audit().unwrap();
    }

    #[test]
    fn scan_pins_cases() {
        // Saturated, entering pin neutral, exactly one sending pin.
        let mut flows = vec![0; 100];
        flows[7] = 3;
        flows[8] = -3;
        let fh = state(3, &flows);
        assert_eq!(fh.scan_pins(0, 0), vec![7]);

        let fh = state(10, &[0, 0, 0]);
        let mut all = fh.scan_pins(0, 1);
        all.sort();
        assert_eq!(all, vec![0, 2]);

        // Saturated, but the entering pin received flow that it can reroute.
        let fh = state(2, &[-2, 2, 0]);
        let mut all = fh.scan_pins(0, 0);
        all.sort();
        assert_eq!(all, vec![1, 2]);
        for v in [1, 2] {
            assert!(fh.residual_capacity(0, 0, v) > 0);
        }
    }

    fn random_hypergraph() -> impl Strategy<Value = (usize, Vec<(Vec<usize>, Weight)>)> {
        (3usize..8).prop_flat_map(|n| {
            let edge = (proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=n), 1i64..20);
            (Just(n), proptest::collection::vec(edge, 1..6))
        })
    }

    proptest! {
        #[test]
        fn pushes_keep_invariants_and_invert(
            (n, edges) in random_hypergraph(),
            ops in proptest::collection::vec((0usize..64, 0usize..64, 0usize..64, 1u8..=255), 1..40),
        ) {
            let mut fh = FlowHypergraph::new(vec![1; n], &edges);
            for (e, a, b, frac) in ops {
                let e = e % edges.len();
                let pins: Vec<_> = fh.pins(e).collect();
                let u = pins[a % pins.len()];
                let v = pins[b % pins.len()];
                if u == v { continue; }
                let r = fh.residual_capacity(u, e, v);
                if r == 0 { continue; }
                let delta = (r * frac as i64 / 255).max(1);
                let before = fh.flow_snapshot();
                fh.push(u, e, v, delta);
                // Single pushes unbalance u and v, so only the per-hyperedge
                // invariants are checked here.
                let mut checked = fh.clone();
                for x in 0..n { checked.set_role(x, Role::Terminal(Side::Source)); }
                prop_assert_eq!(checked.audit(), Ok(()));
                let mut undo = fh.clone();
                undo.push(v, e, u, delta);
                prop_assert_eq!(undo.flow_snapshot(), before);
            }
        }

        #[test]
        fn scan_pins_matches_residuals(
            (n, edges) in random_hypergraph(),
            ops in proptest::collection::vec((0usize..64, 0usize..64, 0usize..64), 0..20),
        ) {
            let mut fh = FlowHypergraph::new(vec![1; n], &edges);
            for (e, a, b) in ops {
                let e = e % edges.len();
                let pins: Vec<_> = fh.pins(e).collect();
                let (u, v) = (pins[a % pins.len()], pins[b % pins.len()]);
                if u != v {
                    let r = fh.residual_capacity(u, e, v);
                    if r > 0 { fh.push(u, e, v, r); }
                }
            }
            for e in 0..fh.num_edges() {
                let pins: Vec<_> = fh.pins(e).collect();
                for &u in &pins {
                    let mut scanned = fh.scan_pins(e, u);
                    scanned.sort();
                    let mut expected: Vec<_> = pins.iter().copied()
                        .filter(|&v| v != u && fh.residual_capacity(u, e, v) > 0)
                        .collect();
                    expected.sort();
                    prop_assert_eq!(scanned, expected);
                }
            }
        }
    }
}
