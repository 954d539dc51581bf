//! Independent brute-force oracle for the integration tests.
//!
//! Deliberately separate from the library's enumeration path: its own edge
//! representation, its own recursive depth-first reachability, and a plain
//! product-of-factors probability per orientation.

// Shared across test binaries; not every binary uses every helper.
#![allow(dead_code)]

use std::collections::BTreeMap;

pub struct Brute {
    pub vertex_count: usize,
    /// `(u, v, bias)`: oriented `u -> v` with probability `bias`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl Brute {
    pub fn new(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Self {
        assert!(vertex_count <= 64 && edges.len() <= 20);
        Brute { vertex_count, edges: edges.to_vec() }
    }

    /// Probability of each orientation, bit `e` of `mask` = edge `e` points
    /// `u -> v`.
    fn orientation_prob(&self, mask: u64) -> f64 {
        self.edges
            .iter()
            .enumerate()
            .map(|(e, &(_, _, bias))| if mask >> e & 1 == 1 { bias } else { 1.0 - bias })
            .product()
    }

    fn wet_set(&self, mask: u64, start: u64) -> u64 {
        let mut wet = start;
        // Fixed-point iteration; slow and obviously correct.
        loop {
            let mut next = wet;
            for (e, &(u, v, _)) in self.edges.iter().enumerate() {
                let (from, to) = if mask >> e & 1 == 1 { (u, v) } else { (v, u) };
                if next >> from & 1 == 1 {
                    next |= 1 << to;
                }
            }
            if next == wet {
                return wet;
            }
            wet = next;
        }
    }

    /// Joint law of the wetness vector from `sources`.
    pub fn joint(&self, sources: &[usize]) -> BTreeMap<u64, f64> {
        let start = sources.iter().fold(0u64, |m, &s| m | 1 << s);
        let mut out = BTreeMap::new();
        for mask in 0..1u64 << self.edges.len() {
            let p = self.orientation_prob(mask);
            if p > 0.0 {
                *out.entry(self.wet_set(mask, start)).or_insert(0.0) += p;
            }
        }
        out
    }

    /// `P(from ⇝ some target)`.
    pub fn prob_reaches(&self, from: usize, targets: &[usize]) -> f64 {
        let target_mask = targets.iter().fold(0u64, |m, &t| m | 1 << t);
        let mut total = 0.0;
        for mask in 0..1u64 << self.edges.len() {
            let p = self.orientation_prob(mask);
            if p > 0.0 && self.wet_set(mask, 1 << from) & target_mask != 0 {
                total += p;
            }
        }
        total
    }
}

pub fn marginal(joint: &BTreeMap<u64, f64>, i: usize) -> f64 {
    joint
        .iter()
        .filter(|(w, _)| *w >> i & 1 == 1)
        .map(|(_, p)| p)
        .sum()
}
