#![allow(dead_code)]

use hfc_core::{
    connectivity_metric, greedy_initial_partition, is_balanced, max_block_weight, refine_kway_observed, RefineConfig, run_hfc, Bipartition, FlowHypergraph, HfcConfig, HfcProblem, Hypergraph, Partition,
    Role, Side, Weight,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random flow problem: up to `max_n` vertices, `max_m` hyperedges of 2..=8
/// pins, capacities in 1..=20, and disjoint non-adjacent terminal sets.
/// Returns `None` when the random terminals could not be made non-adjacent.
pub fn random_flow_problem(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> Option<FlowHypergraph> {
    let n = rng.gen_range(4..=max_n);
    let m = rng.gen_range(1..=max_m);
    let vertices: Vec<usize> = (0..n).collect();
    let edges: Vec<(Vec<usize>, Weight)> = (0..m)
        .map(|_| {
            let size = rng.gen_range(2..=8.min(n));
            let pins = vertices.choose_multiple(rng, size).copied().collect();
            (pins, rng.gen_range(1..=20))
        })
        .collect();
    let mut fh = FlowHypergraph::new(vec![1; n], &edges);
    let mut order = vertices.clone();
    order.shuffle(rng);
    let num_sources = rng.gen_range(1..=3);
    let sources = &order[..num_sources];
    let adjacent_to_source = |v: usize| edges.iter().any(|(pins, _)| pins.contains(&v) && pins.iter().any(|p| sources.contains(p)));
    let targets: Vec<usize> = order[num_sources..]
        .iter()
        .copied()
        .filter(|&v| !adjacent_to_source(v))
        .take(rng.gen_range(1..=3))
        .collect();
    if targets.is_empty() {
        return None;
    }
    for &s in sources {
        fh.set_role(s, Role::Terminal(Side::Source));
    }
    for &t in &targets {
        fh.set_role(t, Role::Terminal(Side::Target));
    }
    Some(fh)
}

/// Random connected unit-weight hypergraph: a random spanning path plus extra hyperedges.
pub fn random_connected_hypergraph(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_size: usize) -> Hypergraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<Vec<usize>> = order.windows(2).map(|w| w.to_vec()).collect();
    for _ in 0..extra {
        let size = rng.gen_range(2..=max_size.min(n));
        edges.push(order.choose_multiple(rng, size).copied().collect());
    }
    let weights = edges.iter().map(|_| rng.gen_range(1..=3)).collect();
    Hypergraph::new(n, edges, Some(weights), None).unwrap()
}

/// Random connected HFC instance with unit vertex weights, one source and
/// one target, and side limits `floor((1 + eps) * ceil(n / 2))`.
pub fn random_hfc_problem(rng: &mut ChaCha8Rng, max_n: usize, eps: f64) -> HfcProblem {
    let n = rng.gen_range(4..=max_n);
    let extra = rng.gen_range(0..=n);
    let hg = random_connected_hypergraph(rng, n, extra, 6);
    let mut fh = FlowHypergraph::from_hypergraph(&hg);
    let s = rng.gen_range(0..n);
    let t = (s + rng.gen_range(1..n)) % n;
    fh.set_role(s, Role::Terminal(Side::Source));
    fh.set_role(t, Role::Terminal(Side::Target));
    let max = ((1.0 + eps) * n.div_ceil(2) as f64 + 1e-9).floor() as Weight;
    let ratings = [0, 1].map(|_| (0..n).map(|_| rng.gen_range(-1..4)).collect());
    HfcProblem {
        hypergraph: fh,
        max_side_weight: [max, max],
        piercing_rating: ratings,
        flow_bound: None,
    }
}

/// Runs HFC and checks every property of the run against independent
/// recomputation. Returns the bipartition, if one was found.
pub fn checked_hfc(problem: &HfcProblem, config: &HfcConfig, seed: u64) -> Result<Option<Bipartition>, String> {
    let fh = &problem.hypergraph;
    let n = fh.num_vertices();
    let result = run_hfc(problem.clone(), config, &mut rng(seed));
    let stats = &result.stats;
    if !stats.audit_failures.is_empty() {
        return Err(format!("audit: {:?}", stats.audit_failures));
    }
    if config.audit && stats.audited_steps == 0 {
        return Err("no audited step".into());
    }
    if stats.cut_history.windows(2).any(|w| w[0] > w[1]) {
        return Err(format!("cut weights decreased: {:?}", stats.cut_history));
    }
    if stats.pierce_steps > n as u64 {
        return Err(format!("{} piercing steps on {n} vertices", stats.pierce_steps));
    }
    if stats.mbc_steps > (config.mbc_repetitions * n) as u64 {
        return Err(format!("{} sweep steps on {n} vertices", stats.mbc_steps));
    }
    let first = hfc_oracles::lawler_max_flow(fh);
    if stats.cut_history[0] != first {
        return Err(format!("first flow {} but oracle says {first}", stats.cut_history[0]));
    }
    let Some(b) = result.bipartition() else { return Ok(None) };
    if b.target_side.len() != n {
        return Err("bipartition does not cover all vertices".into());
    }
    for v in 0..n {
        if fh.is_terminal(v, Side::Source) && b.target_side[v] || fh.is_terminal(v, Side::Target) && !b.target_side[v] {
            return Err(format!("terminal {v} on the wrong side"));
        }
    }
    let mut weights = [0, 0];
    for v in 0..n {
        weights[b.target_side[v] as usize] += fh.vertex_weight(v);
    }
    if weights != b.side_weights {
        return Err(format!("side weights {:?}, recomputed {weights:?}", b.side_weights));
    }
    if weights[0] == 0 || weights[1] == 0 {
        return Err("empty side".into());
    }
    if weights[0] > problem.max_side_weight[0] || weights[1] > problem.max_side_weight[1] {
        return Err(format!("side weights {weights:?} exceed {:?}", problem.max_side_weight));
    }
    let cut = hfc_oracles::bipartition_cut(fh, &b.target_side);
    if cut != b.cut_weight || cut != result.flow_value {
        return Err(format!("cut {cut}, reported {}, flow {}", b.cut_weight, result.flow_value));
    }
    Ok(Some(b.clone()))
}

/// Random connected hypergraph with vertex weights in `1..=max_vertex_weight`.
pub fn random_weighted_hypergraph(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_size: usize, max_vertex_weight: Weight) -> Hypergraph {
    let base = random_connected_hypergraph(rng, n, extra, max_size);
    let edges = base.edges().map(|e| base.pins(e).to_vec()).collect();
    let vertex_weights = (0..n).map(|_| rng.gen_range(1..=max_vertex_weight)).collect();
    Hypergraph::new(n, edges, Some(base.edge_weights().to_vec()), Some(vertex_weights)).unwrap()
}

/// Greedy initial partition that satisfies the balance constraint, if the
/// generator found one within a few attempts.
pub fn balanced_initial(rng: &mut ChaCha8Rng, hg: &Hypergraph, k: usize, eps: f64) -> Option<Partition> {
    (0..8).find_map(|_| {
        let p = greedy_initial_partition(hg, k, rng).unwrap();
        is_balanced(hg, &p, eps).then_some(p)
    })
}

/// Refines `p` and checks every accepted step against full recomputation:
/// gains, balance, audit results and the final metric.
pub fn check_run(hg: &Hypergraph, p: &mut Partition, config: &RefineConfig) -> Result<(), String> {
    let k = p.k();
    let before = hfc_oracles::connectivity(hg, p.assignment());
    let mut last = before;
    let mut error = None;
    let stats = refine_kway_observed(hg, p, config, &mut |p, gain| {
        let now = hfc_oracles::connectivity(hg, p.assignment());
        if gain < 0 || now != last - gain {
            error.get_or_insert(format!("gain {gain} but connectivity went {last} -> {now}"));
        }
        if p.block_weights().iter().any(|&w| w > max_block_weight(hg.total_vertex_weight(), k, config.epsilon)) {
            error.get_or_insert("balance violated".to_string());
        }
        last = now;
    });
    if let Some(e) = error {
        return Err(e);
    }
    if !stats.audit_failures.is_empty() {
        return Err(format!("audit: {:?}", stats.audit_failures));
    }
    let after = hfc_oracles::connectivity(hg, p.assignment());
    if after > before || before - after != stats.total_gain || after != connectivity_metric(hg, p) {
        return Err(format!("connectivity {before} -> {after}, total gain {}", stats.total_gain));
    }
    if !is_balanced(hg, p, config.epsilon) {
        return Err("result not balanced".into());
    }
    Ok(())
}
