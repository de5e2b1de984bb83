//! k-way refinement: improve pairs of blocks with HyperFlowCutter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::extract::{extract_flow_problem, SizeConstraint};
use crate::hfc::{run_hfc, HfcConfig, HfcOutcome};
use crate::hypergraph::{max_block_weight, BlockId, Hypergraph, Partition, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct RefineConfig {
    pub epsilon: f64,
    pub constraint: SizeConstraint,
    pub hfc: HfcConfig,
    pub seed: u64,
    /// Upper limit on scheduling rounds.
    pub max_rounds: usize,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.03,
            constraint: SizeConstraint::Fifth,
            hfc: HfcConfig::default(),
            seed: 0,
            max_rounds: 64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefineStats {
    pub rounds: usize,
    pub flow_problems: u64,
    pub improvements: u64,
    /// Sum of accepted gains; equals the decrease of the connectivity metric.
    pub total_gain: Weight,
    /// Flow problems that ended without a balanced bipartition.
    pub infeasible: u64,
    pub flow_computations: u64,
    pub pierce_steps: u64,
    pub mbc_steps: u64,
    pub mbc_improvements: u64,
    /// Accepted results that moved isolated vertices with the subset-sum table.
    pub dp_activations: u64,
    pub flow_problem_vertices: u64,
    pub max_flow_problem_vertices: usize,
    pub audit_failures: Vec<String>,
}

/// Improves `p` in place and returns what happened.
pub fn refine_kway(hg: &Hypergraph, p: &mut Partition, config: &RefineConfig) -> RefineStats {
    refine_kway_observed(hg, p, config, &mut |_, _| {})
}

/// Like [`refine_kway`], calling `observer` with the partition and the gain
/// after every accepted improvement.
pub fn refine_kway_observed(
    hg: &Hypergraph,
    p: &mut Partition,
    config: &RefineConfig,
    observer: &mut dyn FnMut(&Partition, Weight),
) -> RefineStats {
    let k = p.k();
    let limit = max_block_weight(hg.total_vertex_weight(), k, config.epsilon);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = RefineStats::default();
    let mut active = vec![true; k];
    while stats.rounds < config.max_rounds && active.iter().any(|&a| a) {
        stats.rounds += 1;
        let mut touched = vec![false; k];
        for (i, j) in schedule(hg, p, &active) {
            let bounds = config.constraint.bounds(hg, p, i, j, config.epsilon);
            let Some(extraction) = extract_flow_problem(hg, p, i, j, bounds, limit, &mut rng) else {
                continue;
            };
            stats.flow_problems += 1;
            let size = extraction.problem.hypergraph.num_vertices();
            stats.flow_problem_vertices += size as u64;
            stats.max_flow_problem_vertices = stats.max_flow_problem_vertices.max(size);
            let result = run_hfc(extraction.problem.clone(), &config.hfc, &mut rng);
            stats.flow_computations += result.stats.flow_computations;
            stats.pierce_steps += result.stats.pierce_steps;
            stats.mbc_steps += result.stats.mbc_steps;
            stats.mbc_improvements += result.stats.mbc_improvements;
            stats.audit_failures.extend(result.stats.audit_failures.iter().cloned());
            let HfcOutcome::Balanced(b) = &result.outcome else {
                stats.infeasible += 1;
                continue;
            };
            let gain = extraction.cut_weight - b.cut_weight;
            let old_max = p.block_weight(i).max(p.block_weight(j));
            let new_max = b.side_weights[0].max(b.side_weights[1]);
            if gain < 0 || (gain == 0 && new_max >= old_max) {
                continue;
            }
            for (v, block) in extraction.assignment(&b.target_side) {
                if p.block(v) != block {
                    p.move_vertex(hg, v, block);
                }
            }
            debug_assert_eq!([p.block_weight(i), p.block_weight(j)], b.side_weights);
            stats.improvements += 1;
            stats.total_gain += gain;
            stats.dp_activations += result.stats.dp_used as u64;
            touched[i] = true;
            touched[j] = true;
            observer(p, gain);
        }
        active = touched;
    }
    stats
}

/// Pairs with at least one active block that share a hyperedge, heaviest
/// pair cut first.
fn schedule(hg: &Hypergraph, p: &Partition, active: &[bool]) -> Vec<(BlockId, BlockId)> {
    let k = p.k();
    let mut cut = vec![0 as Weight; k * k];
    let mut blocks = Vec::new();
    for e in hg.edges() {
        blocks.clear();
        blocks.extend(hg.pins(e).iter().map(|&v| p.block(v)));
        blocks.sort_unstable();
        blocks.dedup();
        for (a, &i) in blocks.iter().enumerate() {
            for &j in &blocks[a + 1..] {
                cut[i * k + j] += hg.edge_weight(e);
            }
        }
    }
    let mut pairs: Vec<(Weight, BlockId, BlockId)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if cut[i * k + j] > 0 && (active[i] || active[j]) {
                pairs.push((cut[i * k + j], i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    pairs.into_iter().map(|(_, i, j)| (i, j)).collect()
}
