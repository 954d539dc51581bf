//! Parallel Monte Carlo drivers.
//!
//! Sample `s` always uses RNG stream `s` of the experiment seed, and every
//! aggregate is accumulated in exact integers, so a summary is bit-identical
//! at any thread count and under any rayon scheduling.

use std::collections::BTreeMap;

use oriperc_core::graph::{Graph, GraphError, VertexSet};
use oriperc_core::tree::{TreeError, TreeParams};
use oriperc_core::treesim::{
    stream_rng, MCSummary, TreeAccumulator, TreeSim, DEFAULT_HEIGHT_CAP, GENERATOR_NAME,
};
use rand_core::RngCore;
use rayon::prelude::*;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// `samples` independent tree runs under the default height cap.
pub fn run_tree_experiment(
    params: &TreeParams,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<MCSummary, TreeError> {
    run_tree_experiment_with_cap(params, samples, seed, threads, DEFAULT_HEIGHT_CAP)
}

pub fn run_tree_experiment_with_cap(
    params: &TreeParams,
    samples: u64,
    seed: u64,
    threads: usize,
    cap: u32,
) -> Result<MCSummary, TreeError> {
    let height = params.height();
    let bias = params.bias();
    TreeSim::with_cap(height, cap)?; // validate once up front
    let acc = pool(threads).install(|| {
        (0..samples)
            .into_par_iter()
            .fold(
                || (TreeSim::with_cap(height, cap).expect("validated"), TreeAccumulator::new()),
                |(mut sim, mut acc), s| {
                    let run = sim.simulate(bias, &mut stream_rng(seed, s));
                    acc.push(&run);
                    (sim, acc)
                },
            )
            .map(|(_, acc)| acc)
            .reduce(TreeAccumulator::new, TreeAccumulator::merge)
    });
    Ok(acc.summarize(params, seed))
}

/// Per-vertex wet counts over seeded graph percolation runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMCSummary {
    pub vertex_count: usize,
    pub samples: u64,
    pub seed: u64,
    pub generator: String,
    pub wet_counts: Vec<u64>,
}

impl GraphMCSummary {
    pub fn wet_frequency(&self, v: usize) -> f64 {
        self.wet_counts[v] as f64 / self.samples as f64
    }
}

pub fn run_graph_experiment(
    graph: &Graph,
    sources: &VertexSet,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<GraphMCSummary, GraphError> {
    if sources.is_empty() {
        return Err(GraphError::EmptySource);
    }
    let n = graph.vertex_count();
    let counts = pool(threads).install(|| {
        (0..samples)
            .into_par_iter()
            .fold(
                || vec![0u64; n],
                |mut counts, s| {
                    let o = graph.sample_orientation(&mut stream_rng(seed, s));
                    let wet = graph.reachable_from(&o, sources).expect("validated");
                    for v in wet.iter() {
                        counts[v] += 1;
                    }
                    counts
                },
            )
            .reduce(
                || vec![0u64; n],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    });
    Ok(GraphMCSummary {
        vertex_count: n,
        samples,
        seed,
        generator: String::from(GENERATOR_NAME),
        wet_counts: counts,
    })
}

/// Serial helper: the wet sets of `samples` seeded runs, as bitmasks
/// (graphs of at most 64 vertices).
pub fn sample_wet_masks(graph: &Graph, sources: &VertexSet, samples: u64, seed: u64) -> Vec<u64> {
    (0..samples)
        .map(|s| {
            let o = graph.sample_orientation(&mut stream_rng(seed, s));
            graph.reachable_from(&o, sources).expect("valid inputs").as_mask()
        })
        .collect()
}

/// Unbiased sample covariance of the wetness indicators of `i` and `j` over
/// a collection of wet-set bitmasks.
pub fn estimate_covariance(wet_masks: &[u64], i: usize, j: usize) -> f64 {
    assert!(wet_masks.len() >= 2, "need at least two runs");
    let n = wet_masks.len() as f64;
    let mut ci = 0u64;
    let mut cj = 0u64;
    let mut cij = 0u64;
    for &w in wet_masks {
        let a = w >> i & 1;
        let b = w >> j & 1;
        ci += a;
        cj += b;
        cij += a & b;
    }
    (cij as f64 - ci as f64 * cj as f64 / n) / (n - 1.0)
}

/// Seeded histogram of `samples` draws from `Poisson(lambda)` by inversion,
/// one RNG stream per draw (synthetic mode of the diagnostics command).
pub fn sample_poisson_histogram(lambda: f64, samples: u64, seed: u64) -> BTreeMap<u64, u64> {
    assert!(lambda > 0.0 && lambda < 700.0, "inversion sampling range");
    let mut hist = BTreeMap::new();
    for s in 0..samples {
        let u = stream_rng(seed, s).next_u64() as f64 / (u64::MAX as f64 + 1.0);
        let mut k = 0u64;
        let mut pmf = (-lambda).exp();
        let mut cdf = pmf;
        while u >= cdf && k < 100_000 {
            k += 1;
            pmf *= lambda / k as f64;
            cdf += pmf;
        }
        *hist.entry(k).or_insert(0) += 1;
    }
    hist
}
