//! Immutable weighted hypergraphs, k-way partitions and the objective metrics.

use thiserror::Error;

/// Vertex weights, hyperedge weights and flow values.
pub type Weight = i64;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type BlockId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("hyperedge {edge} is empty")]
    EmptyHyperedge { edge: EdgeId },
    #[error("hyperedge {edge} references vertex {vertex}, but there are only {num_vertices} vertices")]
    PinOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        num_vertices: usize,
    },
    #[error("weight of {what} {index} is {weight}, weights must be positive")]
    NonPositiveWeight {
        what: &'static str,
        index: usize,
        weight: Weight,
    },
    #[error("expected {expected} {what} weights, got {got}")]
    WeightCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// A weighted hypergraph stored as two CSR incidence arrays.
///
/// Pins of a hyperedge are deduplicated on construction, so both incidence
/// directions describe the same set of (vertex, hyperedge) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    edge_offsets: Vec<usize>,
    pins: Vec<VertexId>,
    vertex_offsets: Vec<usize>,
    incident: Vec<EdgeId>,
    vertex_weights: Vec<Weight>,
    edge_weights: Vec<Weight>,
    total_weight: Weight,
}

impl Hypergraph {
    /// Builds a hypergraph from pin lists. `None` weights default to 1.
    pub fn new(
        num_vertices: usize,
        edges: Vec<Vec<VertexId>>,
        edge_weights: Option<Vec<Weight>>,
        vertex_weights: Option<Vec<Weight>>,
    ) -> Result<Self, HypergraphError> {
        let edge_weights = edge_weights.unwrap_or_else(|| vec![1; edges.len()]);
        let vertex_weights = vertex_weights.unwrap_or_else(|| vec![1; num_vertices]);
        if edge_weights.len() != edges.len() {
            return Err(HypergraphError::WeightCount {
                what: "hyperedge",
                expected: edges.len(),
                got: edge_weights.len(),
            });
        }
        if vertex_weights.len() != num_vertices {
            return Err(HypergraphError::WeightCount {
                what: "vertex",
                expected: num_vertices,
                got: vertex_weights.len(),
            });
        }
        if let Some((index, &weight)) = edge_weights.iter().enumerate().find(|(_, &w)| w < 1) {
            return Err(HypergraphError::NonPositiveWeight {
                what: "hyperedge",
                index,
                weight,
            });
        }
        if let Some((index, &weight)) = vertex_weights.iter().enumerate().find(|(_, &w)| w < 1) {
            return Err(HypergraphError::NonPositiveWeight {
                what: "vertex",
                index,
                weight,
            });
        }

        let mut edge_offsets = Vec::with_capacity(edges.len() + 1);
        let mut pins = Vec::new();
        let mut degree = vec![0usize; num_vertices];
        let mut last_seen = vec![usize::MAX; num_vertices];
        edge_offsets.push(0);
        for (e, edge) in edges.iter().enumerate() {
            if edge.is_empty() {
                return Err(HypergraphError::EmptyHyperedge { edge: e });
            }
            for &v in edge {
                if v >= num_vertices {
                    return Err(HypergraphError::PinOutOfRange {
                        edge: e,
                        vertex: v,
                        num_vertices,
                    });
                }
                if last_seen[v] != e {
                    last_seen[v] = e;
                    pins.push(v);
                    degree[v] += 1;
                }
            }
            edge_offsets.push(pins.len());
        }

        let mut vertex_offsets = Vec::with_capacity(num_vertices + 1);
        vertex_offsets.push(0);
        for d in &degree {
            vertex_offsets.push(vertex_offsets.last().unwrap() + d);
        }
        let mut fill = vertex_offsets[..num_vertices].to_vec();
        let mut incident = vec![0; pins.len()];
        for e in 0..edges.len() {
            for &v in &pins[edge_offsets[e]..edge_offsets[e + 1]] {
                incident[fill[v]] = e;
                fill[v] += 1;
            }
        }

        let total_weight = vertex_weights.iter().sum();
        Ok(Self {
            edge_offsets,
            pins,
            vertex_offsets,
            incident,
            vertex_weights,
            edge_weights,
            total_weight,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_weights.len()
    }

    pub fn num_pins(&self) -> usize {
        self.pins.len()
    }

    pub fn pins(&self, e: EdgeId) -> &[VertexId] {
        &self.pins[self.edge_offsets[e]..self.edge_offsets[e + 1]]
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[self.vertex_offsets[v]..self.vertex_offsets[v + 1]]
    }

    pub fn edge_size(&self, e: EdgeId) -> usize {
        self.edge_offsets[e + 1] - self.edge_offsets[e]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_offsets[v + 1] - self.vertex_offsets[v]
    }

    pub fn vertex_weight(&self, v: VertexId) -> Weight {
        self.vertex_weights[v]
    }

    pub fn edge_weight(&self, e: EdgeId) -> Weight {
        self.edge_weights[e]
    }

    pub fn vertex_weights(&self) -> &[Weight] {
        &self.vertex_weights
    }

    pub fn edge_weights(&self) -> &[Weight] {
        &self.edge_weights
    }

    pub fn total_vertex_weight(&self) -> Weight {
        self.total_weight
    }

    pub fn has_vertex_weights(&self) -> bool {
        self.vertex_weights.iter().any(|&w| w != 1)
    }

    pub fn has_edge_weights(&self) -> bool {
        self.edge_weights.iter().any(|&w| w != 1)
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.num_vertices()
    }

    pub fn edges(&self) -> std::ops::Range<EdgeId> {
        0..self.num_edges()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("k must be at least 1")]
    ZeroBlocks,
    #[error("vertex {vertex} is assigned to block {block}, but k = {k}")]
    BlockOutOfRange { vertex: VertexId, block: BlockId, k: usize },
    #[error("assignment has {got} entries, the hypergraph has {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("block {block} is empty")]
    EmptyBlock { block: BlockId },
}

/// Assignment of every vertex to one of `k` blocks, with cached block weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    assignment: Vec<BlockId>,
    block_weights: Vec<Weight>,
}

impl Partition {
    /// Validates `assignment` against `hg`. Every block must be non-empty.
    pub fn new(hg: &Hypergraph, k: usize, assignment: Vec<BlockId>) -> Result<Self, PartitionError> {
        if k == 0 {
            return Err(PartitionError::ZeroBlocks);
        }
        if assignment.len() != hg.num_vertices() {
            return Err(PartitionError::WrongLength {
                expected: hg.num_vertices(),
                got: assignment.len(),
            });
        }
        let mut block_weights = vec![0; k];
        let mut block_size = vec![0usize; k];
        for (vertex, &block) in assignment.iter().enumerate() {
            if block >= k {
                return Err(PartitionError::BlockOutOfRange { vertex, block, k });
            }
            block_weights[block] += hg.vertex_weight(vertex);
            block_size[block] += 1;
        }
        if let Some(block) = block_size.iter().position(|&s| s == 0) {
            return Err(PartitionError::EmptyBlock { block });
        }
        Ok(Self {
            k,
            assignment,
            block_weights,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block(&self, v: VertexId) -> BlockId {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[BlockId] {
        &self.assignment
    }

    pub fn block_weight(&self, b: BlockId) -> Weight {
        self.block_weights[b]
    }

    pub fn block_weights(&self) -> &[Weight] {
        &self.block_weights
    }

    /// Moves `v` to block `to`. The caller keeps blocks non-empty.
    pub fn move_vertex(&mut self, hg: &Hypergraph, v: VertexId, to: BlockId) {
        let from = self.assignment[v];
        if from == to {
            return;
        }
        let w = hg.vertex_weight(v);
        self.block_weights[from] -= w;
        self.block_weights[to] += w;
        self.assignment[v] = to;
    }

    pub fn max_block_weight(&self) -> Weight {
        self.block_weights.iter().copied().max().unwrap_or(0)
    }
}

/// Largest block weight allowed by the balance constraint,
/// `floor((1 + epsilon) * total / k)`.
pub fn max_block_weight(total_weight: Weight, k: usize, epsilon: f64) -> Weight {
    let bound = (1.0 + epsilon) * total_weight as f64 / k as f64;
    // Absorb representation error, e.g. 1.03 * 100 / 2 = 51.50000000000001.
    (bound + 1e-9).floor() as Weight
}

/// Sum over hyperedges of `weight * (blocks touched - 1)`.
pub fn connectivity_metric(hg: &Hypergraph, partition: &Partition) -> Weight {
    let mut seen = vec![usize::MAX; partition.k()];
    let mut total = 0;
    for e in hg.edges() {
        let mut lambda = 0;
        for &v in hg.pins(e) {
            let b = partition.block(v);
            if seen[b] != e {
                seen[b] = e;
                lambda += 1;
            }
        }
        if lambda > 1 {
            total += hg.edge_weight(e) * (lambda - 1);
        }
    }
    total
}

/// `max_i weight(V_i) / (weight(V) / k) - 1`.
pub fn imbalance(hg: &Hypergraph, partition: &Partition) -> f64 {
    imbalance_of(partition.block_weights(), hg.total_vertex_weight())
}

pub fn imbalance_of(block_weights: &[Weight], total_weight: Weight) -> f64 {
    let k = block_weights.len() as f64;
    let max = block_weights.iter().copied().max().unwrap_or(0) as f64;
    max * k / total_weight as f64 - 1.0
}

pub fn is_balanced(hg: &Hypergraph, partition: &Partition, epsilon: f64) -> bool {
    let limit = max_block_weight(hg.total_vertex_weight(), partition.k(), epsilon);
    partition.block_weights().iter().all(|&w| w <= limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(weight: Weight) -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1, 2]], Some(vec![weight]), None).unwrap()
    }

    #[test]
    fn incidence_directions_agree() {
        let hg = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2, 3], vec![3, 0, 0]], None, None).unwrap();
        assert_eq!(hg.num_pins(), 7);
        assert_eq!(hg.pins(2), &[3, 0]);
        for v in hg.vertices() {
            for &e in hg.incident_edges(v) {
                assert!(hg.pins(e).contains(&v));
            }
        }
        for e in hg.edges() {
            for &v in hg.pins(e) {
                assert!(hg.incident_edges(v).contains(&e));
            }
        }
        let degree_sum: usize = hg.vertices().map(|v| hg.degree(v)).sum();
        assert_eq!(degree_sum, hg.num_pins());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Hypergraph::new(2, vec![vec![]], None, None),
            Err(HypergraphError::EmptyHyperedge { edge: 0 })
        );
        assert!(matches!(
            Hypergraph::new(2, vec![vec![0, 2]], None, None),
            Err(HypergraphError::PinOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, vec![vec![0, 1]], Some(vec![0]), None),
            Err(HypergraphError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn connectivity_examples() {
        let hg = triangle(3);
        let one = Partition::new(&hg, 1, vec![0, 0, 0]).unwrap();
        assert_eq!(connectivity_metric(&hg, &one), 0);
        let two = Partition::new(&hg, 2, vec![0, 1, 1]).unwrap();
        assert_eq!(connectivity_metric(&hg, &two), 3);
        let three = Partition::new(&hg, 3, vec![0, 1, 2]).unwrap();
        assert_eq!(connectivity_metric(&hg, &three), 6);
    }

    #[test]
    fn imbalance_examples() {
        assert_eq!(imbalance_of(&[5, 5], 10), 0.0);
        assert!((imbalance_of(&[6, 4], 10) - 0.2).abs() < 1e-12);
        let hg = Hypergraph::new(10, vec![vec![0, 9]], None, None).unwrap();
        let p = Partition::new(&hg, 2, (0..10).map(|v| v / 5).collect()).unwrap();
        assert!(is_balanced(&hg, &p, 0.03));
        assert_eq!(max_block_weight(100, 2, 0.03), 51);
        assert_eq!(max_block_weight(6, 2, 0.0), 3);
    }

    #[test]
    fn partition_validation() {
        let hg = triangle(1);
        assert!(matches!(
            Partition::new(&hg, 2, vec![0, 0, 0]),
            Err(PartitionError::EmptyBlock { block: 1 })
        ));
        assert!(matches!(
            Partition::new(&hg, 2, vec![0, 5, 1]),
            Err(PartitionError::BlockOutOfRange { block: 5, .. })
        ));
        let mut p = Partition::new(&hg, 2, vec![0, 1, 1]).unwrap();
        p.move_vertex(&hg, 2, 0);
        assert_eq!(p.block_weights(), &[2, 1]);
    }
}
