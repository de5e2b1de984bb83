//! Incremental subset-sum table for isolated vertices.
//!
//! Isolated vertices can be placed on either side without changing the cut,
//! so the achievable side weights are the subset sums of their weights. The
//! table grows as vertices become isolated and keeps a list of maximal runs
//! of consecutive achievable sums, so a balance query costs one step per run.

use crate::hypergraph::{VertexId, Weight};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SumRange {
    lo: Weight,
    hi: Weight,
    alive: bool,
}

#[derive(Debug, Clone)]
pub struct IsolatedDp {
    achievable: Vec<bool>,
    /// Item whose insertion first made the sum achievable.
    via: Vec<u32>,
    /// Range id, valid at the two endpoints of every range.
    range_of: Vec<u32>,
    ranges: Vec<SumRange>,
    items: Vec<(VertexId, Weight)>,
    total: Weight,
    frozen: bool,
    table_limit: usize,
}

impl IsolatedDp {
    /// `table_limit` caps the number of table entries; an insertion that
    /// would exceed it freezes the table instead.
    pub fn new(table_limit: usize) -> Self {
        Self {
            achievable: vec![true],
            via: vec![NONE],
            range_of: vec![0],
            ranges: vec![SumRange {
                lo: 0,
                hi: 0,
                alive: true,
            }],
            items: Vec::new(),
            total: 0,
            frozen: false,
            table_limit,
        }
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Stops accepting vertices.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn total_weight(&self) -> Weight {
        self.total
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.items.iter().map(|&(v, _)| v)
    }

    pub fn is_achievable(&self, sum: Weight) -> bool {
        sum >= 0 && (sum as usize) < self.achievable.len() && self.achievable[sum as usize]
    }

    /// Adds an isolated vertex. Returns `false` if the table is frozen or
    /// would outgrow its limit (which freezes it).
    pub fn insert(&mut self, v: VertexId, weight: Weight) -> bool {
        assert!(weight > 0);
        if self.frozen {
            return false;
        }
        let new_total = self.total + weight;
        if new_total as usize + 1 > self.table_limit {
            self.frozen = true;
            return false;
        }
        let item = self.items.len() as u32;
        self.items.push((v, weight));
        let size = new_total as usize + 1;
        self.achievable.resize(size, false);
        self.via.resize(size, NONE);
        self.range_of.resize(size, NONE);
        let w = weight as usize;
        for x in (0..=self.total as usize).rev() {
            if self.achievable[x] && !self.achievable[x + w] {
                self.achievable[x + w] = true;
                self.via[x + w] = item;
                self.add_sum(x + w);
            }
        }
        self.total = new_total;
        true
    }

    fn add_sum(&mut self, s: usize) {
        let left = s > 0 && self.achievable[s - 1];
        let right = s + 1 < self.achievable.len() && self.achievable[s + 1];
        match (left, right) {
            (false, false) => {
                self.range_of[s] = self.ranges.len() as u32;
                self.ranges.push(SumRange {
                    lo: s as Weight,
                    hi: s as Weight,
                    alive: true,
                });
            }
            (true, false) => {
                let r = self.range_of[s - 1];
                self.ranges[r as usize].hi = s as Weight;
                self.range_of[s] = r;
            }
            (false, true) => {
                let r = self.range_of[s + 1];
                self.ranges[r as usize].lo = s as Weight;
                self.range_of[s] = r;
            }
            (true, true) => {
                let l = self.range_of[s - 1];
                let r = self.range_of[s + 1];
                let hi = self.ranges[r as usize].hi;
                self.ranges[r as usize].alive = false;
                self.ranges[l as usize].hi = hi;
                self.range_of[hi as usize] = l;
                self.range_of[s] = l;
            }
        }
    }

    /// Maximal runs of achievable sums, ascending.
    pub fn ranges(&self) -> Vec<(Weight, Weight)> {
        let mut out: Vec<_> = self.live_ranges().collect();
        out.sort_unstable();
        out
    }

    fn live_ranges(&self) -> impl Iterator<Item = (Weight, Weight)> + '_ {
        self.ranges.iter().filter(|r| r.alive).map(|r| (r.lo, r.hi))
    }

    /// Achievable sum in `[lo, hi]` closest to `twice_ideal / 2`, if any.
    /// The target is given doubled so that it may lie halfway between two
    /// integers. Ties go to the smaller sum.
    pub fn closest_in_window(&self, lo: Weight, hi: Weight, twice_ideal: Weight) -> Option<Weight> {
        let mut best: Option<(Weight, Weight)> = None;
        for (a, b) in self.live_ranges() {
            let (a, b) = (a.max(lo), b.min(hi));
            if a > b {
                continue;
            }
            for x in [twice_ideal.div_euclid(2).clamp(a, b), (twice_ideal + 1).div_euclid(2).clamp(a, b)] {
                let d = (2 * x - twice_ideal).abs();
                if best.is_none_or(|(bd, y)| (d, x) < (bd, y)) {
                    best = Some((d, x));
                }
            }
        }
        best.map(|(_, x)| x)
    }

    /// Vertices whose weights add up to `sum`, which must be achievable.
    pub fn subset_for(&self, sum: Weight) -> Vec<VertexId> {
        assert!(self.is_achievable(sum), "sum {sum} is not achievable");
        let mut out = Vec::new();
        let mut s = sum as usize;
        while s > 0 {
            let (v, w) = self.items[self.via[s] as usize];
            out.push(v);
            s -= w as usize;
        }
        out
    }
}

/// Weight of isolated vertices to put on a side so that both sides respect
/// their limits, preferring the most even split.
///
/// `side_weight` and `other_weight` exclude the isolated vertices.
pub fn split_for_balance(
    dp: &IsolatedDp,
    side_weight: Weight,
    other_weight: Weight,
    side_max: Weight,
    other_max: Weight,
) -> Option<Weight> {
    let iso = dp.total_weight();
    let lo = (other_weight + iso - other_max).max(0);
    let hi = (side_max - side_weight).min(iso);
    if lo > hi {
        return None;
    }
    // The slack min(hi' - x, x - lo') peaks halfway between the unclamped bounds.
    dp.closest_in_window(lo, hi, other_weight + iso - other_max + side_max - side_weight)
}
