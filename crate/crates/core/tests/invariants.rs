//! Property-based invariants: reachability closure and monotonicity,
//! single-edge flip monotonicity, reversal involution, mass normalization,
//! and the root-wetting recurrence bounds.

mod common;

use common::Brute;
use oriperc_core::graph::{Graph, Orientation, VertexSet};
use oriperc_core::oracle::enumerate_joint;
use oriperc_core::tree::{rho_bounds, rho_sequence, TreeParams};
use proptest::prelude::*;

/// Small random graph: up to 6 vertices, each candidate edge kept with an
/// independent random bias.
fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..=6)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let count = pairs.len();
            (
                Just(pairs),
                prop::collection::vec(prop::option::of(0.0f64..=1.0), count),
            )
        })
        .prop_map(|(pairs, biases)| {
            let mut edges: Vec<(usize, usize, f64)> = pairs
                .iter()
                .zip(biases)
                .filter_map(|(&(u, v), b)| b.map(|b| (u, v, b)))
                .collect();
            if edges.is_empty() {
                edges.push((0, 1, 0.5));
            }
            let n = 1 + edges.iter().map(|&(_, v, _)| v).max().unwrap();
            Graph::new(n, &edges).unwrap()
        })
}

fn wet_mask(g: &Graph, o: &Orientation, sources: &VertexSet) -> u64 {
    g.reachable_from(o, sources).unwrap().as_mask()
}

proptest! {
    #[test]
    fn reach_contains_sources_and_is_closed(
        g in arb_graph(),
        index in any::<u64>(),
        source in 0usize..6,
    ) {
        let n = g.vertex_count();
        let source = source % n;
        let o = Orientation::from_index(g.edge_count(), index);
        let s = VertexSet::singleton(n, source);
        let wet = wet_mask(&g, &o, &s);
        prop_assert!(wet >> source & 1 == 1);
        // Closure: no oriented edge leaves the wet set.
        for (e, edge) in g.edges().iter().enumerate() {
            let (from, to) = if o.bit(e) { (edge.u, edge.v) } else { (edge.v, edge.u) };
            if wet >> from & 1 == 1 {
                prop_assert!(wet >> to & 1 == 1, "edge {from}->{to} leaves the wet set");
            }
        }
    }

    #[test]
    fn reach_monotone_in_sources(
        g in arb_graph(),
        index in any::<u64>(),
        a in 0usize..6,
        b in 0usize..6,
    ) {
        let n = g.vertex_count();
        let (a, b) = (a % n, b % n);
        let o = Orientation::from_index(g.edge_count(), index);
        let small = wet_mask(&g, &o, &VertexSet::singleton(n, a));
        let large = wet_mask(&g, &o, &VertexSet::from_ids(n, &[a, b]));
        prop_assert_eq!(small & !large, 0, "smaller source reached more");
    }

    #[test]
    fn flipping_an_edge_away_from_the_wet_set_never_enlarges_it(
        g in arb_graph(),
        index in any::<u64>(),
        source in 0usize..6,
    ) {
        let n = g.vertex_count();
        let s = VertexSet::singleton(n, source % n);
        let o = Orientation::from_index(g.edge_count(), index);
        let wet = wet_mask(&g, &o, &s);
        for e in 0..g.edge_count() {
            let flipped = Orientation::from_index(g.edge_count(), index ^ (1 << e));
            let edge = &g.edges()[e];
            let new_tail = if flipped.bit(e) { edge.u } else { edge.v };
            if wet >> new_tail & 1 == 0 {
                let after = wet_mask(&g, &flipped, &s);
                prop_assert_eq!(after & !wet, 0, "flip of edge {} enlarged the wet set", e);
            }
        }
    }

    #[test]
    fn reversal_is_an_involution(g in arb_graph()) {
        let round_trip = g.reversed().reversed();
        prop_assert_eq!(g.edge_count(), round_trip.edge_count());
        for (a, b) in g.edges().iter().zip(round_trip.edges()) {
            prop_assert_eq!((a.u, a.v), (b.u, b.v));
            prop_assert!((a.bias - b.bias).abs() < 1e-15);
        }
    }

    #[test]
    fn joint_law_is_normalized_and_supported_above_the_source(
        g in arb_graph(),
        source in 0usize..6,
    ) {
        let n = g.vertex_count();
        let source = source % n;
        let d = enumerate_joint(&g, &VertexSet::singleton(n, source)).unwrap();
        prop_assert!((d.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(d.mass().keys().all(|w| w >> source & 1 == 1));
        prop_assert!(d.mass().values().all(|&p| p >= 0.0));
    }

    #[test]
    fn joint_law_matches_brute_force(g in arb_graph(), source in 0usize..6) {
        let n = g.vertex_count();
        let source = source % n;
        let edges: Vec<(usize, usize, f64)> =
            g.edges().iter().map(|e| (e.u, e.v, e.bias)).collect();
        let d = enumerate_joint(&g, &VertexSet::singleton(n, source)).unwrap();
        let brute = Brute::new(n, &edges).joint(&[source]);
        for (&w, &p) in d.mass() {
            let q = brute.get(&w).copied().unwrap_or(0.0);
            prop_assert!((p - q).abs() < 1e-12, "mask {:b}: {} vs {}", w, p, q);
        }
        prop_assert!(brute.keys().all(|w| d.mass().contains_key(w) || brute[w] == 0.0));
    }

    #[test]
    fn rho_stays_in_unit_interval_and_respects_the_sandwich(
        p in 0.0f64..0.499,
        height in 1u32..40,
    ) {
        let params = TreeParams::new(height, p).unwrap();
        let rho = rho_sequence(&params);
        for k in 0..=height {
            let r = rho[k as usize];
            prop_assert!((0.0..=1.0).contains(&r));
            let (lo, hi) = rho_bounds(&params, k).unwrap();
            prop_assert!(lo - 1e-12 <= r && r <= hi + 1e-12, "k={} r={} in [{}, {}]", k, r, lo, hi);
        }
        // Monotone decreasing below the threshold.
        for k in 0..height as usize {
            prop_assert!(rho[k + 1] <= rho[k] + 1e-15);
        }
    }
}
