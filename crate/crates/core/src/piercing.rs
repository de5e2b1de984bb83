//! Bucket priority queue of piercing candidates keyed by an integer rating.

use rand::Rng;

use crate::hypergraph::VertexId;

/// Candidates rated `-1..`; entries that became invalid are dropped lazily
/// when their bucket is inspected.
#[derive(Debug, Clone, Default)]
pub struct PiercingQueue {
    buckets: Vec<Vec<VertexId>>,
    queued: Vec<bool>,
}

impl PiercingQueue {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            buckets: Vec::new(),
            queued: vec![false; num_vertices],
        }
    }

    /// Inserts `v` unless it was inserted before.
    pub fn push(&mut self, v: VertexId, rating: i32) {
        assert!(rating >= -1, "ratings start at -1");
        if std::mem::replace(&mut self.queued[v], true) {
            return;
        }
        let bucket = (rating + 1) as usize;
        if self.buckets.len() <= bucket {
            self.buckets.resize_with(bucket + 1, Vec::new);
        }
        self.buckets[bucket].push(v);
    }

    pub fn is_queued(&self, v: VertexId) -> bool {
        self.queued[v]
    }

    /// Number of entries, including stale ones not yet dropped.
    pub fn len(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Removes and returns a candidate.
    ///
    /// Entries with `stale(v)` are discarded for good; entries failing
    /// `eligible(v)` are skipped but kept. Among the remaining ones, the
    /// highest bucket that contains a vertex with `preferred(v)` wins and one
    /// of its preferred vertices is drawn uniformly. If no preferred vertex
    /// exists and `fallback` is set, a uniform draw from the highest
    /// non-empty bucket is returned instead.
    pub fn select<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        stale: impl Fn(VertexId) -> bool,
        eligible: impl Fn(VertexId) -> bool,
        preferred: impl Fn(VertexId) -> bool,
        fallback: bool,
    ) -> Option<VertexId> {
        let mut highest: Option<usize> = None;
        let mut picks: Vec<usize> = Vec::new();
        for b in (0..self.buckets.len()).rev() {
            let bucket = &mut self.buckets[b];
            let mut i = 0;
            while i < bucket.len() {
                if stale(bucket[i]) {
                    bucket.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            picks.clear();
            picks.extend((0..bucket.len()).filter(|&i| eligible(bucket[i])));
            if picks.is_empty() {
                continue;
            }
            highest.get_or_insert(b);
            let preferred_picks: Vec<usize> = picks.iter().copied().filter(|&i| preferred(bucket[i])).collect();
            if !preferred_picks.is_empty() {
                let i = preferred_picks[rng.gen_range(0..preferred_picks.len())];
                return Some(bucket.swap_remove(i));
            }
        }
        if !fallback {
            return None;
        }
        let b = highest?;
        let candidates: Vec<usize> = (0..self.buckets[b].len())
            .filter(|&i| eligible(self.buckets[b][i]))
            .collect();
        let i = candidates[rng.gen_range(0..candidates.len())];
        Some(self.buckets[b].swap_remove(i))
    }
}
