//! Small named graphs used across the validation suites: paths, a star, a
//! triangle, a 4-cycle, `K4` and the height-2 binary tree, all with a
//! uniform orientation bias.

use alloc::vec::Vec;

use crate::graph::Graph;
use crate::treesim::tree_as_graph;

/// Path on `k` vertices, edges `(0,1), (1,2), ...`.
pub fn path(k: usize, bias: f64) -> Graph {
    let edges: Vec<_> = (0..k - 1).map(|i| (i, i + 1, bias)).collect();
    Graph::new(k, &edges).expect("valid path")
}

/// Star `K_{1,k}` with center 0.
pub fn star(k: usize, bias: f64) -> Graph {
    let edges: Vec<_> = (1..=k).map(|v| (0, v, bias)).collect();
    Graph::new(k + 1, &edges).expect("valid star")
}

pub fn triangle(bias: f64) -> Graph {
    complete(3, bias)
}

/// Cycle on `k` vertices.
pub fn cycle(k: usize, bias: f64) -> Graph {
    let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k, bias)).collect();
    Graph::new(k, &edges).expect("valid cycle")
}

/// Complete graph on `k` vertices.
pub fn complete(k: usize, bias: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v, bias));
        }
    }
    Graph::new(k, &edges).expect("valid complete graph")
}

/// The named validation corpus: P3, P4, K1,3, triangle, C4, K4 and the
/// height-2 complete binary tree.
pub fn corpus(bias: f64) -> Vec<(&'static str, Graph)> {
    alloc::vec![
        ("P3", path(3, bias)),
        ("P4", path(4, bias)),
        ("K1,3", star(3, bias)),
        ("triangle", triangle(bias)),
        ("C4", cycle(4, bias)),
        ("K4", complete(4, bias)),
        ("T2", tree_as_graph(2, bias)),
    ]
}
