//! Cross-checks of the enumeration oracle against an independently written
//! brute-force reference, plus the structural monotonicity properties of the
//! joint wetness law.

mod common;

use common::{marginal, Brute};
use oriperc_core::graph::{Graph, VertexSet};
use oriperc_core::oracle::enumerate_joint;

fn assert_maps_close(
    a: &std::collections::BTreeMap<u64, f64>,
    b: &std::collections::BTreeMap<u64, f64>,
) {
    let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    for k in keys {
        let x = a.get(&k).copied().unwrap_or(0.0);
        let y = b.get(&k).copied().unwrap_or(0.0);
        assert!((x - y).abs() < 1e-12, "mask {k:b}: {x} vs {y}");
    }
}

#[test]
fn oracle_matches_brute_force_on_mixed_biases() {
    let cases: Vec<(usize, Vec<(usize, usize, f64)>, Vec<usize>)> = vec![
        (3, vec![(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)], vec![0]),
        (4, vec![(0, 1, 0.3), (1, 2, 0.8), (2, 3, 0.1), (0, 3, 0.6)], vec![0]),
        (5, vec![(0, 1, 0.25), (0, 2, 0.75), (1, 3, 0.5), (2, 4, 1.0), (3, 4, 0.0)], vec![0, 1]),
        (
            4,
            vec![(0, 1, 0.5), (0, 2, 0.5), (0, 3, 0.5), (1, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)],
            vec![2],
        ),
        (6, vec![(0, 1, 0.9), (1, 2, 0.9), (3, 4, 0.2), (4, 5, 0.2)], vec![0, 3]),
    ];
    for (n, edges, sources) in cases {
        let g = Graph::new(n, &edges).unwrap();
        let d = enumerate_joint(&g, &VertexSet::from_ids(n, &sources)).unwrap();
        let brute = Brute::new(n, &edges).joint(&sources);
        assert_maps_close(d.mass(), &brute);
    }
}

#[test]
fn reversal_duality() {
    // Reachability *from* T in the bias-complemented graph has the law of
    // reachability *to* T in the original: the marginal of i under sources T
    // in reversed(G) equals P(i reaches T) in G, computed brute-force.
    let cases: Vec<(usize, Vec<(usize, usize, f64)>, Vec<usize>)> = vec![
        (4, vec![(0, 1, 0.3), (1, 2, 0.7), (2, 3, 0.5)], vec![3]),
        (4, vec![(0, 1, 0.7), (0, 2, 0.7), (0, 3, 0.7)], vec![1, 2]),
        (3, vec![(0, 1, 0.2), (0, 2, 0.9), (1, 2, 0.4)], vec![0]),
        (5, vec![(0, 1, 0.5), (1, 2, 0.25), (2, 3, 0.75), (3, 4, 0.5), (0, 4, 0.1)], vec![2]),
    ];
    for (n, edges, targets) in cases {
        let g = Graph::new(n, &edges).unwrap();
        let reversed = g.reversed();
        let d = enumerate_joint(&reversed, &VertexSet::from_ids(n, &targets)).unwrap();
        let brute = Brute::new(n, &edges);
        for i in 0..n {
            let from_reversed = d.marginal(i);
            let to_targets = brute.prob_reaches(i, &targets);
            assert!(
                (from_reversed - to_targets).abs() < 1e-12,
                "vertex {i}: {from_reversed} vs {to_targets}"
            );
        }
    }
}

#[test]
fn marginals_monotone_in_sources() {
    let edges = [(0, 1, 0.4), (1, 2, 0.6), (2, 3, 0.5), (0, 3, 0.3), (1, 3, 0.7)];
    let g = Graph::new(4, &edges).unwrap();
    let chains: [(&[usize], &[usize]); 3] =
        [(&[0], &[0, 1]), (&[0, 1], &[0, 1, 2]), (&[2], &[0, 2])];
    for (small, large) in chains {
        let d_small = enumerate_joint(&g, &VertexSet::from_ids(4, small)).unwrap();
        let d_large = enumerate_joint(&g, &VertexSet::from_ids(4, large)).unwrap();
        for i in 0..4 {
            assert!(
                d_small.marginal(i) <= d_large.marginal(i) + 1e-12,
                "sources {small:?} vs {large:?}, vertex {i}"
            );
        }
    }
}

#[test]
fn marginals_monotone_under_edge_addition() {
    // Growing chain of subgraphs on a fixed vertex set: each added edge can
    // only increase every wetting probability.
    let all_edges = [
        (0, 1, 0.5),
        (1, 2, 0.4),
        (2, 3, 0.6),
        (3, 0, 0.5),
        (0, 2, 0.3),
        (1, 3, 0.7),
    ];
    let s = VertexSet::singleton(4, 0);
    let mut prev: Option<Vec<f64>> = None;
    for take in 1..=all_edges.len() {
        let g = Graph::new(4, &all_edges[..take]).unwrap();
        let d = enumerate_joint(&g, &s).unwrap();
        let marginals: Vec<f64> = (0..4).map(|i| d.marginal(i)).collect();
        if let Some(p) = prev {
            for i in 0..4 {
                assert!(p[i] <= marginals[i] + 1e-12, "take={take} vertex={i}");
            }
        }
        prev = Some(marginals);
    }
}

#[test]
fn exact_mode_agrees_with_float_mode() {
    // Same graph with dyadic biases: the exact-rational view and a brute
    // float pass must coincide to rounding.
    let edges = [(0, 1, 0.5), (0, 2, 0.25), (1, 2, 0.75), (1, 3, 0.125), (2, 3, 0.5)];
    let g = Graph::new(4, &edges).unwrap();
    let d = enumerate_joint(&g, &VertexSet::singleton(4, 0)).unwrap();
    assert!(d.is_exact());
    let brute = Brute::new(4, &edges).joint(&[0]);
    assert_maps_close(d.mass(), &brute);
    for i in 0..4 {
        assert!((d.marginal(i) - marginal(&brute, i)).abs() < 1e-12);
    }
}
