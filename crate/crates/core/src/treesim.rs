//! Single-run simulation of (bidirectional and downwards) percolation from
//! the leaves of the complete binary tree, plus merge-able run statistics.
//!
//! The tree is stored as an implicit heap array: root at index 1, children
//! of `v` at `2v` and `2v+1`, leaves at indices `2^n .. 2^{n+1}`. The edge
//! above vertex `v` (toward its parent) is sampled as one `u64` draw per
//! vertex, in index order — that order is the canonical draw order, shared
//! with the same tree encoded as a [`Graph`].
//!
//! Aggregation is exact integer arithmetic throughout, so merging partial
//! accumulators is associative and commutative: a parallel driver gets
//! bit-identical summaries at any parallelism degree.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::graph::{bernoulli_threshold, Graph, VertexSet};
use crate::tree::{TreeError, TreeParams};

/// Default cap on tree height for simulation (about 10^8 vertices).
pub const DEFAULT_HEIGHT_CAP: u32 = 26;

/// Name of the replica RNG, recorded in output metadata.
pub const GENERATOR_NAME: &str = "chacha8";

/// Independent reproducible stream `stream` of the generator seeded with
/// `seed`. Streams are used one per sample, so results do not depend on how
/// samples are scheduled across threads.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Outcome of one simulated percolation on `T_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeRun {
    /// Wet non-leaf vertices in the bidirectional model.
    pub cluster_size: u64,
    /// Wet non-leaf vertices in the downwards model.
    pub downwards_size: u64,
    /// Maximum level reached by downwards flow (0 if no non-leaf vertex is
    /// wet); the root has level `n`.
    pub max_level: u32,
    pub root_wet: bool,
}

/// Reusable simulation scratch for a fixed height.
///
/// All per-vertex state is bit-packed into `u64` words (vertex `v` is bit
/// `v % 64` of word `v / 64`), and the percolation passes run word-parallel
/// where a word lies entirely inside one level — which holds for every word
/// except word 0, handled bit by bit. A word of 64 siblings reduces to its 32
/// parents with a pairwise-OR bit compression, and a parent half-word expands
/// back over its 64 children.
pub struct TreeSim {
    height: u32,
    /// Bit `v`: the edge above `v` points at the parent.
    toward: Vec<u64>,
    /// Bit `v`: downwards wetness `Y_v`.
    down: Vec<u64>,
    /// Bit `v`: from-below arrival `A_v`.
    below: Vec<u64>,
}

#[inline]
fn get(bits: &[u64], v: usize) -> bool {
    bits[v >> 6] >> (v & 63) & 1 == 1
}

#[inline]
fn set(bits: &mut [u64], v: usize, b: bool) {
    let mask = 1u64 << (v & 63);
    if b {
        bits[v >> 6] |= mask;
    } else {
        bits[v >> 6] &= !mask;
    }
}

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

/// OR adjacent bit pairs of `c` down to the low 32 bits: output bit `k` is
/// `c[2k] | c[2k+1]` (64 children to their 32 parents).
#[inline]
fn pairwise_or_compress(c: u64) -> u64 {
    let mut x = (c | (c >> 1)) & EVEN_BITS;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
    (x | (x >> 16)) & 0x0000_0000_ffff_ffff
}

/// Double each of the low 32 bits of `p`: output bits `2k` and `2k+1` both
/// equal `p[k]` (32 parents over their 64 children).
#[inline]
fn expand_double(p: u64) -> u64 {
    let mut x = p & 0x0000_0000_ffff_ffff;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & EVEN_BITS;
    x | (x << 1)
}

/// Swap adjacent bit pairs: bit `v` moves to `v ^ 1` (sibling exchange).
#[inline]
fn swap_siblings(x: u64) -> u64 {
    ((x & !EVEN_BITS) >> 1) | ((x & EVEN_BITS) << 1)
}

impl TreeSim {
    pub fn new(height: u32) -> Result<Self, TreeError> {
        Self::with_cap(height, DEFAULT_HEIGHT_CAP)
    }

    pub fn with_cap(height: u32, cap: u32) -> Result<Self, TreeError> {
        if height < 1 {
            return Err(TreeError::HeightTooSmall);
        }
        if height > cap {
            return Err(TreeError::HeightCapExceeded { height, cap });
        }
        let size = 1usize << (height + 1);
        let words = size.div_ceil(64);
        Ok(TreeSim {
            height,
            toward: vec![0; words],
            down: vec![0; words],
            below: vec![0; words],
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    fn first_leaf(&self) -> usize {
        1 << self.height
    }

    fn size(&self) -> usize {
        1 << (self.height + 1)
    }

    /// Sample every parent edge (toward the root with probability `bias`)
    /// and run both percolation passes. One `u64` draw per vertex `2..size`
    /// in index order; degenerate biases consume no draws.
    pub fn simulate<R: RngCore>(&mut self, bias: f64, rng: &mut R) -> TreeRun {
        let size = self.size();
        match bernoulli_threshold(bias) {
            None => {
                let fill = if bias >= 1.0 { u64::MAX } else { 0 };
                for w in self.toward.iter_mut() {
                    *w = fill;
                }
                self.toward[0] &= !0b11; // vertices 0 and 1 have no edge
                if size < 64 {
                    self.toward[0] &= (1 << size) - 1;
                }
            }
            Some(t) => {
                let mut word = 0u64;
                for bit in 2..size.min(64) {
                    word |= ((rng.next_u64() < t) as u64) << bit;
                }
                self.toward[0] = word;
                for w in self.toward.iter_mut().skip(1) {
                    let mut word = 0u64;
                    for bit in 0..64 {
                        word |= ((rng.next_u64() < t) as u64) << bit;
                    }
                    *w = word;
                }
            }
        }
        self.run_passes()
    }

    /// Run both passes on a forced orientation; `toward_root[v]` for vertex
    /// `v` is entry `v - 2` (heap index order, matching the draw order).
    pub fn apply_orientation(&mut self, toward_root: &[bool]) -> TreeRun {
        assert_eq!(toward_root.len(), self.size() - 2, "orientation length");
        for w in self.toward.iter_mut() {
            *w = 0;
        }
        for (e, &b) in toward_root.iter().enumerate() {
            set(&mut self.toward, e + 2, b);
        }
        self.run_passes()
    }

    /// Bidirectional wetness of heap vertex `v` after the last run.
    pub fn is_wet(&self, v: usize) -> bool {
        get(&self.down, v) || get(&self.below, v)
    }

    /// Downwards wetness of heap vertex `v` after the last run.
    pub fn is_down_wet(&self, v: usize) -> bool {
        get(&self.down, v)
    }

    #[cfg(test)]
    fn toward_root(&self, v: usize) -> bool {
        get(&self.toward, v)
    }

    fn run_passes(&mut self) -> TreeRun {
        let first_leaf = self.first_leaf();
        let size = self.size();
        let words = self.down.len();

        // Upward pass: Y_v = (Y_left and left->v) or (Y_right and right->v),
        // with Y = true at the leaves. Word w >= 1 sits inside one level and
        // its children fill words 2w and 2w+1 exactly, so levels reduce
        // word-by-word from the deepest up; word 0 is finished bit by bit.
        for w in self.down.iter_mut() {
            *w = 0;
        }
        if first_leaf >= 64 {
            for w in first_leaf / 64..words {
                self.down[w] = u64::MAX;
            }
        } else {
            for v in first_leaf..size {
                set(&mut self.down, v, true);
            }
        }
        for parent in (1..words / 2).rev() {
            let (l, r) = (2 * parent, 2 * parent + 1);
            self.down[parent] = pairwise_or_compress(self.down[l] & self.toward[l])
                | pairwise_or_compress(self.down[r] & self.toward[r]) << 32;
        }
        for v in (1..first_leaf.min(64)).rev() {
            let (l, r) = (2 * v, 2 * v + 1);
            let y = (get(&self.down, l) && get(&self.toward, l))
                || (get(&self.down, r) && get(&self.toward, r));
            set(&mut self.down, v, y);
        }

        // Downward pass: A_v = (parent -> v) and (A_parent or (Y_sibling and
        // sibling -> parent)); A_root = false. Word w >= 2 reads its parents
        // from half of word w/2, already final because w/2 < w.
        for w in self.below.iter_mut() {
            *w = 0;
        }
        for v in 2..size.min(128) {
            let a = !get(&self.toward, v)
                && (get(&self.below, v / 2)
                    || (get(&self.down, v ^ 1) && get(&self.toward, v ^ 1)));
            set(&mut self.below, v, a);
        }
        for w in 2..words {
            let parents = expand_double(self.below[w / 2] >> (32 * (w & 1)));
            let feeds_parent = swap_siblings(self.down[w] & self.toward[w]);
            self.below[w] = !self.toward[w] & (parents | feeds_parent);
        }

        // Counts over non-leaf vertices (bit 0 is not a vertex).
        let mut cluster = 0u64;
        let mut downwards = 0u64;
        if first_leaf >= 64 {
            cluster += ((self.down[0] | self.below[0]) & !1).count_ones() as u64;
            downwards += (self.down[0] & !1).count_ones() as u64;
            for w in 1..first_leaf / 64 {
                cluster += (self.down[w] | self.below[w]).count_ones() as u64;
                downwards += self.down[w].count_ones() as u64;
            }
        } else {
            let mask = ((1u64 << first_leaf) - 1) & !1;
            cluster = ((self.down[0] | self.below[0]) & mask).count_ones() as u64;
            downwards = (self.down[0] & mask).count_ones() as u64;
        }

        // The first down-wet vertex in heap order has minimal depth, hence
        // maximal level.
        let mut max_level = 0u32;
        let internal_mask = if first_leaf >= 64 { !1 } else { ((1u64 << first_leaf) - 1) & !1 };
        if self.down[0] & internal_mask != 0 {
            let v = (self.down[0] & internal_mask).trailing_zeros() as usize;
            max_level = self.height - v.ilog2();
        } else if first_leaf >= 64 {
            for w in 1..first_leaf / 64 {
                if self.down[w] != 0 {
                    let v = 64 * w + self.down[w].trailing_zeros() as usize;
                    max_level = self.height - v.ilog2();
                    break;
                }
            }
        }

        TreeRun {
            cluster_size: cluster,
            downwards_size: downwards,
            max_level,
            root_wet: get(&self.down, 1),
        }
    }
}

/// Level (distance from the leaf set) of heap vertex `v` in `T_n`.
pub fn heap_level(height: u32, v: usize) -> u32 {
    height - v.ilog2()
}

/// `T_n` encoded as a [`Graph`]: vertex id = heap index − 1, one edge
/// `(child, parent)` per non-root vertex in heap order, biased `child ->
/// parent` with probability `bias`. Edge order matches [`TreeSim`]'s draw
/// order, so the same seed produces the same orientation in both codings.
pub fn tree_as_graph(height: u32, bias: f64) -> Graph {
    let size = 1usize << (height + 1);
    let edges: Vec<_> = (2..size).map(|v| (v - 1, v / 2 - 1, bias)).collect();
    Graph::new(size - 1, &edges).expect("tree is a valid simple graph")
}

/// The leaf set of [`tree_as_graph`].
pub fn tree_leaves(height: u32) -> VertexSet {
    let size = 1usize << (height + 1);
    let mut s = VertexSet::new(size - 1);
    for v in (size / 2)..size {
        s.insert(v - 1);
    }
    s
}

/// Non-leaf vertices of [`tree_as_graph`].
pub fn tree_internal(height: u32) -> VertexSet {
    let size = 1usize << (height + 1);
    let mut s = VertexSet::new(size - 1);
    for v in 1..size / 2 {
        s.insert(v - 1);
    }
    s
}

/// Integer partial statistics over a set of runs. Merging is exact.
#[derive(Clone, Debug, Default)]
pub struct TreeAccumulator {
    pub samples: u64,
    pub sum_cluster: u128,
    pub sum_cluster_sq: u128,
    pub sum_downwards: u128,
    pub sum_downwards_sq: u128,
    pub histogram: BTreeMap<u64, u64>,
    pub max_level_counts: BTreeMap<u32, u64>,
    pub root_wet_count: u64,
}

impl TreeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, run: &TreeRun) {
        self.samples += 1;
        self.sum_cluster += run.cluster_size as u128;
        self.sum_cluster_sq += (run.cluster_size as u128) * (run.cluster_size as u128);
        self.sum_downwards += run.downwards_size as u128;
        self.sum_downwards_sq += (run.downwards_size as u128) * (run.downwards_size as u128);
        *self.histogram.entry(run.cluster_size).or_insert(0) += 1;
        *self.max_level_counts.entry(run.max_level).or_insert(0) += 1;
        if run.root_wet {
            self.root_wet_count += 1;
        }
    }

    pub fn merge(mut self, other: TreeAccumulator) -> TreeAccumulator {
        self.samples += other.samples;
        self.sum_cluster += other.sum_cluster;
        self.sum_cluster_sq += other.sum_cluster_sq;
        self.sum_downwards += other.sum_downwards;
        self.sum_downwards_sq += other.sum_downwards_sq;
        for (k, c) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += c;
        }
        for (k, c) in other.max_level_counts {
            *self.max_level_counts.entry(k).or_insert(0) += c;
        }
        self.root_wet_count += other.root_wet_count;
        self
    }

    pub fn summarize(&self, params: &TreeParams, seed: u64) -> MCSummary {
        let n = self.samples;
        MCSummary {
            height: params.height(),
            bias: params.bias(),
            samples: n,
            mean_cluster: mean(self.sum_cluster, n),
            var_cluster: variance(self.sum_cluster, self.sum_cluster_sq, n),
            mean_downwards: mean(self.sum_downwards, n),
            var_downwards: variance(self.sum_downwards, self.sum_downwards_sq, n),
            histogram: self.histogram.clone(),
            max_level_counts: self.max_level_counts.clone(),
            root_wet_frequency: self.root_wet_count as f64 / n as f64,
            seed,
            generator: String::from(GENERATOR_NAME),
        }
    }
}

fn mean(sum: u128, n: u64) -> f64 {
    sum as f64 / n as f64
}

/// Unbiased sample variance from integer power sums.
fn variance(sum: u128, sum_sq: u128, n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let n_f = n as f64;
    let mean = sum as f64 / n_f;
    let ex2 = sum_sq as f64 / n_f;
    let biased = ex2 - mean * mean;
    (biased * n_f / (n_f - 1.0)).max(0.0)
}

/// Sample statistics of a tree Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct MCSummary {
    pub height: u32,
    pub bias: f64,
    pub samples: u64,
    pub mean_cluster: f64,
    pub var_cluster: f64,
    pub mean_downwards: f64,
    pub var_downwards: f64,
    pub histogram: BTreeMap<u64, u64>,
    pub max_level_counts: BTreeMap<u32, u64>,
    pub root_wet_frequency: f64,
    pub seed: u64,
    pub generator: String,
}
