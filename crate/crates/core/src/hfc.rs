//! HyperFlowCutter: a sequence of incremental maximum flow problems that
//! trades cut weight for balance until both sides fit their weight limits.

use rand::Rng;

use crate::dinic::{Dinic, Reachability};
use crate::flow_hypergraph::{FlowHypergraph, Role, Side};
use crate::hypergraph::{VertexId, Weight};
use crate::isolated::{split_for_balance, IsolatedDp};
use crate::piercing::PiercingQueue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HfcConfig {
    /// Assign isolated vertices with the subset-sum table.
    pub isolated_dp: bool,
    /// Prefer piercing candidates far from the original cut.
    pub distance_piercing: bool,
    /// Keep piercing after the first balanced cut and return the most balanced one.
    pub most_balanced_cut: bool,
    pub mbc_repetitions: usize,
    /// Largest subset-sum table; the table freezes when it would grow beyond.
    pub dp_table_limit: usize,
    /// Recheck every flow step against a from-scratch computation.
    pub audit: bool,
}

impl Default for HfcConfig {
    fn default() -> Self {
        Self {
            isolated_dp: true,
            distance_piercing: true,
            most_balanced_cut: true,
            mbc_repetitions: 7,
            dp_table_limit: 1 << 24,
            audit: false,
        }
    }
}

/// Flow hypergraph with its initial terminals plus the side limits.
#[derive(Debug, Clone)]
pub struct HfcProblem {
    pub hypergraph: FlowHypergraph,
    /// Weight limits of the source and target side.
    pub max_side_weight: [Weight; 2],
    /// Piercing ratings per side, indexed by vertex; empty means all 0.
    pub piercing_rating: [Vec<i32>; 2],
    /// Give up once the flow exceeds this value.
    pub flow_bound: Option<Weight>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    /// `true` for vertices on the target side.
    pub target_side: Vec<bool>,
    pub cut_weight: Weight,
    pub side_weights: [Weight; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasible {
    FlowBoundExceeded { flow: Weight, bound: Weight },
    NoPiercingCandidate,
    TerminalOverweight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HfcOutcome {
    Balanced(Bipartition),
    Infeasible(Infeasible),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HfcStats {
    /// Maximum flow computations, counting each incremental restart.
    pub flow_computations: u64,
    /// Piercing steps before the first balanced cut.
    pub pierce_steps: u64,
    /// Piercing steps of the most-balanced-cut sweeps.
    pub mbc_steps: u64,
    pub mbc_improvements: u64,
    /// Whether the returned bipartition moved isolated vertices to the source side.
    pub dp_used: bool,
    /// Vertices held in the subset-sum table at the end.
    pub isolated: usize,
    /// Flow value after each flow computation of the main loop.
    pub cut_history: Vec<Weight>,
    pub audited_steps: u64,
    pub audit_failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HfcResult {
    pub outcome: HfcOutcome,
    pub flow_value: Weight,
    pub stats: HfcStats,
}

impl HfcResult {
    pub fn bipartition(&self) -> Option<&Bipartition> {
        match &self.outcome {
            HfcOutcome::Balanced(b) => Some(b),
            HfcOutcome::Infeasible(_) => None,
        }
    }
}

/// Runs HyperFlowCutter on `problem`.
pub fn run_hfc<R: Rng + ?Sized>(problem: HfcProblem, config: &HfcConfig, rng: &mut R) -> HfcResult {
    let HfcProblem {
        hypergraph,
        max_side_weight,
        piercing_rating,
        flow_bound,
    } = problem;
    let n = hypergraph.num_vertices();
    let rating = if config.distance_piercing {
        piercing_rating.map(|r| if r.is_empty() { vec![0; n] } else { r })
    } else {
        [vec![0; n], vec![0; n]]
    };
    for r in &rating {
        assert_eq!(r.len(), n, "one piercing rating per vertex");
    }
    let mut cutter = Cutter {
        dinic: Dinic::new(&hypergraph),
        state: State::new(hypergraph),
        config,
        max_side: max_side_weight,
        rating,
        dp: IsolatedDp::new(config.dp_table_limit),
        in_dp: vec![false; n],
        stats: HfcStats::default(),
    };
    let outcome = cutter.run(flow_bound, rng);
    cutter.stats.isolated = cutter.dp.len();
    HfcResult {
        outcome,
        flow_value: cutter.state.flow,
        stats: cutter.stats,
    }
}

/// Everything a most-balanced-cut sweep modifies and restores.
#[derive(Debug, Clone)]
struct State {
    fh: FlowHypergraph,
    flow: Weight,
    reach: [Reachability; 2],
    queues: [PiercingQueue; 2],
    terminal_weight: [Weight; 2],
    /// Whether the hyperedge has a terminal of the side.
    has_terminal: [Vec<bool>; 2],
    /// Incident hyperedges with terminals of both sides.
    mixed: Vec<u32>,
    newly_isolated: Vec<VertexId>,
}

impl State {
    fn new(fh: FlowHypergraph) -> Self {
        let n = fh.num_vertices();
        let m = fh.num_edges();
        let empty = |side| Reachability {
            side,
            reached: vec![false; n],
            vertices: Vec::new(),
            cut_edges: Vec::new(),
            cut_weight: 0,
            weight: 0,
        };
        let mut state = Self {
            flow: 0,
            reach: [empty(Side::Source), empty(Side::Target)],
            queues: [PiercingQueue::new(n), PiercingQueue::new(n)],
            terminal_weight: [0, 0],
            has_terminal: [vec![false; m], vec![false; m]],
            mixed: vec![0; n],
            newly_isolated: Vec::new(),
            fh,
        };
        for v in 0..n {
            if let Role::Terminal(side) = state.fh.role(v) {
                state.fh.set_role(v, Role::Free);
                state.make_terminal(v, side);
            }
        }
        for v in 0..n {
            if state.fh.degree(v) == 0 {
                state.newly_isolated.push(v);
            }
        }
        state
    }

    fn make_terminal(&mut self, v: VertexId, side: Side) {
        debug_assert_eq!(self.fh.role(v), Role::Free);
        self.fh.set_role(v, Role::Terminal(side));
        self.terminal_weight[side.index()] += self.fh.vertex_weight(v);
        let edges: Vec<_> = self.fh.incident_edges(v).collect();
        for e in edges {
            if std::mem::replace(&mut self.has_terminal[side.index()][e], true) {
                continue;
            }
            if !self.has_terminal[side.other().index()][e] {
                continue;
            }
            let pins: Vec<_> = self.fh.pins(e).collect();
            for p in pins {
                self.mixed[p] += 1;
                if self.is_isolated(p) {
                    self.newly_isolated.push(p);
                }
            }
        }
    }

    fn is_isolated(&self, v: VertexId) -> bool {
        self.fh.role(v) == Role::Free && self.mixed[v] as usize == self.fh.degree(v)
    }
}

/// A bipartition induced by one reachable set, with isolated weight `x`
/// moved to the source side.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    cut_side: Side,
    isolated_to_source: Weight,
    /// Smallest remaining capacity of the two sides; larger is more balanced.
    slack: Weight,
}

struct Cutter<'a> {
    state: State,
    dinic: Dinic,
    config: &'a HfcConfig,
    max_side: [Weight; 2],
    rating: [Vec<i32>; 2],
    dp: IsolatedDp,
    in_dp: Vec<bool>,
    stats: HfcStats,
}

impl Cutter<'_> {
    fn run<R: Rng + ?Sized>(&mut self, flow_bound: Option<Weight>, rng: &mut R) -> HfcOutcome {
        for side in [Side::Source, Side::Target] {
            if self.state.terminal_weight[side.index()] > self.max_side[side.index()] {
                return HfcOutcome::Infeasible(Infeasible::TerminalOverweight);
            }
        }
        self.absorb_isolated();
        self.state.flow = self.dinic.exhaust_flow(&mut self.state.fh);
        loop {
            self.stats.flow_computations += 1;
            self.stats.cut_history.push(self.state.flow);
            if let Some(bound) = flow_bound {
                if self.state.flow > bound {
                    return HfcOutcome::Infeasible(Infeasible::FlowBoundExceeded {
                        flow: self.state.flow,
                        bound,
                    });
                }
            }
            self.compute_reachable();
            if self.config.audit {
                self.audit_step();
            }
            if let Some(candidate) = self.best_candidate() {
                self.dp.freeze();
                let mut best = self.materialize(candidate);
                if self.config.most_balanced_cut {
                    self.most_balanced_sweep(candidate, &mut best, rng);
                }
                self.audit_isolated();
                self.stats.dp_used = best.1;
                return HfcOutcome::Balanced(best.0);
            }
            let side = if self.state.reach[0].weight <= self.state.reach[1].weight {
                Side::Source
            } else {
                Side::Target
            };
            self.grow(side);
            if self.state.terminal_weight[side.index()] > self.max_side[side.index()] {
                return HfcOutcome::Infeasible(Infeasible::TerminalOverweight);
            }
            self.absorb_isolated();
            let Some(v) = self
                .select_piercing(side, true, rng)
                .or_else(|| self.select_any_free(side, rng))
            else {
                return HfcOutcome::Infeasible(Infeasible::NoPiercingCandidate);
            };
            let avoids = !self.state.reach[side.other().index()].contains(v);
            self.stats.pierce_steps += 1;
            let delta = self.pierce(side, v);
            assert!(!avoids || delta == 0, "avoiding piercing increased the flow");
            self.absorb_isolated();
        }
    }

    fn compute_reachable(&mut self) {
        for side in [Side::Source, Side::Target] {
            self.state.reach[side.index()] = self.dinic.compute_reachable(&self.state.fh, side);
        }
    }

    /// Makes every vertex of the side's reachable set a terminal and queues
    /// the pins of its cut hyperedges.
    fn grow(&mut self, side: Side) {
        let s = side.index();
        let vertices = std::mem::take(&mut self.state.reach[s].vertices);
        for &v in &vertices {
            if self.state.fh.role(v) == Role::Free {
                self.state.make_terminal(v, side);
            }
        }
        self.state.reach[s].vertices = vertices;
        for i in 0..self.state.reach[s].cut_edges.len() {
            let e = self.state.reach[s].cut_edges[i];
            let pins: Vec<_> = self.state.fh.pins(e).collect();
            for p in pins {
                if self.state.fh.role(p) == Role::Free && !self.in_dp[p] {
                    self.state.queues[s].push(p, self.rating[s][p]);
                }
            }
        }
        if self.config.audit {
            let terminals: Vec<_> = self.state.fh.terminals(side).collect();
            if terminals != self.state.reach[s].vertices {
                self.fail("grown terminal set differs from the reachable set".into());
            }
        }
    }

    fn select_piercing<R: Rng + ?Sized>(&mut self, side: Side, fallback: bool, rng: &mut R) -> Option<VertexId> {
        let s = side.index();
        let state = &mut self.state;
        let fh = &state.fh;
        let in_dp = &self.in_dp;
        let other = &state.reach[side.other().index()];
        let room = self.max_side[s] - state.terminal_weight[s];
        state.queues[s].select(
            rng,
            |v| fh.role(v) != Role::Free || in_dp[v],
            |v| fh.vertex_weight(v) <= room,
            |v| !other.contains(v),
            fallback,
        )
    }

    /// Fallback once every pin of the side's cut hyperedges is a terminal:
    /// a uniformly drawn free vertex, preferring those that avoid augmenting paths.
    fn select_any_free<R: Rng + ?Sized>(&self, side: Side, rng: &mut R) -> Option<VertexId> {
        let room = self.max_side[side.index()] - self.state.terminal_weight[side.index()];
        let other = &self.state.reach[side.other().index()];
        let free: Vec<VertexId> = (0..self.state.fh.num_vertices())
            .filter(|&v| self.state.fh.role(v) == Role::Free && !self.in_dp[v] && self.state.fh.vertex_weight(v) <= room)
            .collect();
        let avoiding: Vec<VertexId> = free.iter().copied().filter(|&v| !other.contains(v)).collect();
        let pool = if avoiding.is_empty() { free } else { avoiding };
        (!pool.is_empty()).then(|| pool[rng.gen_range(0..pool.len())])
    }

    /// Adds `v` to the terminals of `side` and restores a maximum flow.
    /// Returns the flow increase.
    fn pierce(&mut self, side: Side, v: VertexId) -> Weight {
        self.state.make_terminal(v, side);
        let delta = self.dinic.restart_from_piercing(&mut self.state.fh, side, v);
        self.state.flow += delta;
        delta
    }

    fn absorb_isolated(&mut self) {
        let fresh = std::mem::take(&mut self.state.newly_isolated);
        if !self.config.isolated_dp {
            return;
        }
        for v in fresh {
            if self.in_dp[v] || !self.state.is_isolated(v) {
                continue;
            }
            if self.dp.insert(v, self.state.fh.vertex_weight(v)) {
                self.in_dp[v] = true;
            }
        }
    }

    fn evaluate(&self, cut_side: Side) -> Option<Candidate> {
        let total = self.state.fh.total_weight();
        let iso = self.dp.total_weight();
        let reached = self.state.reach[cut_side.index()].weight;
        let (source, target) = match cut_side {
            Side::Source => (reached, total - reached - iso),
            Side::Target => (total - reached - iso, reached),
        };
        let x = split_for_balance(&self.dp, source, target, self.max_side[0], self.max_side[1])?;
        let slack = (self.max_side[0] - source - x).min(self.max_side[1] - target - (iso - x));
        Some(Candidate {
            cut_side,
            isolated_to_source: x,
            slack,
        })
    }

    fn best_candidate(&self) -> Option<Candidate> {
        let a = self.evaluate(Side::Source);
        let b = self.evaluate(Side::Target);
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.slack > a.slack { b } else { a }),
            (a, b) => a.or(b),
        }
    }

    /// The bipartition of a candidate, and whether isolated vertices were
    /// moved to the source side.
    fn materialize(&self, c: Candidate) -> (Bipartition, bool) {
        let reach = &self.state.reach[c.cut_side.index()];
        let mut target_side: Vec<bool> = match c.cut_side {
            Side::Source => reach.reached.iter().map(|&r| !r).collect(),
            Side::Target => reach.reached.clone(),
        };
        for v in self.dp.vertices() {
            target_side[v] = true;
        }
        let moved = self.dp.subset_for(c.isolated_to_source);
        for &v in &moved {
            target_side[v] = false;
        }
        let mut side_weights = [0, 0];
        for (v, &t) in target_side.iter().enumerate() {
            side_weights[t as usize] += self.state.fh.vertex_weight(v);
        }
        (
            Bipartition {
                target_side,
                cut_weight: reach.cut_weight,
                side_weights,
            },
            !moved.is_empty(),
        )
    }

    /// Keeps piercing without creating augmenting paths and keeps the most
    /// balanced cut of the current weight.
    fn most_balanced_sweep<R: Rng + ?Sized>(&mut self, first: Candidate, best: &mut (Bipartition, bool), rng: &mut R) {
        let snapshot = self.state.clone();
        let mut best_slack = first.slack;
        for rep in 0..self.config.mbc_repetitions {
            let mut side = if rep % 2 == 0 { Side::Source } else { Side::Target };
            loop {
                let Some((s, v)) = self.sweep_candidate(side, rng) else {
                    break;
                };
                let delta = self.pierce(s, v);
                assert_eq!(delta, 0, "avoiding piercing increased the flow");
                self.stats.mbc_steps += 1;
                self.absorb_isolated();
                self.compute_reachable();
                if let Some(c) = self.best_candidate() {
                    if c.slack > best_slack {
                        best_slack = c.slack;
                        *best = self.materialize(c);
                        self.stats.mbc_improvements += 1;
                    }
                }
                side = s.other();
            }
            self.state = snapshot.clone();
        }
    }

    /// Grows `preferred` (or else the other side) and draws a vertex whose
    /// piercing avoids augmenting paths.
    fn sweep_candidate<R: Rng + ?Sized>(&mut self, preferred: Side, rng: &mut R) -> Option<(Side, VertexId)> {
        for side in [preferred, preferred.other()] {
            self.grow(side);
            if let Some(v) = self.select_piercing(side, false, rng) {
                return Some((side, v));
            }
        }
        None
    }

    fn fail(&mut self, message: String) {
        self.stats.audit_failures.push(message);
    }

    fn audit_step(&mut self) {
        self.stats.audited_steps += 1;
        if let Err(e) = self.state.fh.audit() {
            self.fail(format!("flow audit: {e}"));
        }
        let mut fresh = self.state.fh.clone();
        fresh.reset_flow();
        let mut dinic = Dinic::new(&fresh);
        let flow = dinic.exhaust_flow(&mut fresh);
        if flow != self.state.flow {
            self.fail(format!("incremental flow {} differs from recomputed {}", self.state.flow, flow));
        }
        for side in [Side::Source, Side::Target] {
            let r = dinic.compute_reachable(&fresh, side);
            let current = &self.state.reach[side.index()];
            let same = r.reached == current.reached;
            let cut_weight = current.cut_weight;
            if !same {
                self.fail(format!("{side:?} reachable set differs from recomputation"));
            }
            if cut_weight != self.state.flow {
                self.fail(format!("{side:?} cut weight {cut_weight} differs from flow {}", self.state.flow));
            }
        }
        let history = &self.stats.cut_history;
        if history.windows(2).any(|w| w[0] > w[1]) {
            self.fail("cut weight decreased".into());
        }
        if self.stats.pierce_steps > self.state.fh.num_vertices() as u64 {
            self.fail("more piercing steps than vertices".into());
        }
        self.audit_isolated();
    }

    fn audit_isolated(&mut self) {
        if !self.config.audit {
            return;
        }
        let lost: Vec<_> = self
            .dp
            .vertices()
            .filter(|&v| !self.state.is_isolated(v) || self.state.reach.iter().any(|r| r.contains(v)))
            .collect();
        if !lost.is_empty() {
            self.fail(format!("vertices {lost:?} are no longer isolated"));
        }
    }
}
