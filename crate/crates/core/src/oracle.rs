//! Exact joint law of the wetness indicators `{S ⇝ i}` by enumeration of
//! all `2^|E|` orientations.
//!
//! When every bias is a dyadic rational with denominator at most `2^16` and
//! the graph has at most 16 edges, the distribution is additionally computed
//! in exact rational arithmetic, so headline probabilities like 5/8 come out
//! bit-exact. Otherwise only the double-precision mass is available.
//!
//! Enumeration is edge-index-major binary counting over orientations, split
//! into fixed chunks of `2^12` indices. The float mass of the full
//! distribution is defined as the left-to-right fold of the per-chunk masses;
//! a parallel driver that computes chunks independently and folds them in
//! chunk order reproduces the serial result bit for bit.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::{Graph, GraphError, VertexSet};

/// Default cap on the number of edges enumerated (`2^24` orientations).
pub const DEFAULT_EDGE_CAP: usize = 24;

/// Wetness vectors are stored as `u64` bitmasks.
pub const VERTEX_CAP: usize = 64;

/// Edge count above which exact rational arithmetic is not attempted.
pub const EXACT_EDGE_CAP: usize = 16;

/// Dyadic denominator for biases eligible for exact arithmetic.
pub const DYADIC_DENOMINATOR: u64 = 1 << 16;

const CHUNK_BITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    EdgeCapExceeded { edges: usize, cap: usize },
    VertexCapExceeded { vertices: usize },
    EmptySource,
    WindowTooLarge { size: usize, cap: usize },
    Graph(GraphError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::EdgeCapExceeded { edges, cap } => {
                write!(f, "graph has {edges} edges, enumeration capped at {cap}")
            }
            OracleError::VertexCapExceeded { vertices } => {
                write!(f, "graph has {vertices} vertices, oracle capped at {VERTEX_CAP}")
            }
            OracleError::EmptySource => write!(f, "empty source"),
            OracleError::WindowTooLarge { size, cap } => {
                write!(f, "free-vertex window of size {size} exceeds cap {cap}")
            }
            OracleError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl From<GraphError> for OracleError {
    fn from(e: GraphError) -> Self {
        OracleError::Graph(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

/// Exact probability mass over wetness bit-vectors in `{0,1}^V`.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    vertex_count: usize,
    source: VertexSet,
    mass: BTreeMap<u64, f64>,
    exact: Option<BTreeMap<u64, BigRational>>,
}

impl JointDistribution {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn source(&self) -> &VertexSet {
        &self.source
    }

    /// Mass map keyed by wetness bitmask.
    pub fn mass(&self) -> &BTreeMap<u64, f64> {
        &self.mass
    }

    /// Exact mass map, present in rational mode.
    pub fn exact_mass(&self) -> Option<&BTreeMap<u64, BigRational>> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    /// `P(i wet)`.
    pub fn marginal(&self, i: usize) -> f64 {
        self.mass
            .iter()
            .filter(|(w, _)| *w >> i & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn marginal_exact(&self, i: usize) -> Option<BigRational> {
        let exact = self.exact.as_ref()?;
        Some(
            exact
                .iter()
                .filter(|(w, _)| *w >> i & 1 == 1)
                .fold(BigRational::from_integer(0.into()), |acc, (_, p)| acc + p),
        )
    }

    /// `P(i wet, j wet)`.
    pub fn joint_pair(&self, i: usize, j: usize) -> f64 {
        self.mass
            .iter()
            .filter(|(w, _)| *w >> i & 1 == 1 && *w >> j & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn joint_pair_exact(&self, i: usize, j: usize) -> Option<BigRational> {
        let exact = self.exact.as_ref()?;
        Some(
            exact
                .iter()
                .filter(|(w, _)| *w >> i & 1 == 1 && *w >> j & 1 == 1)
                .fold(BigRational::from_integer(0.into()), |acc, (_, p)| acc + p),
        )
    }

    /// `Cov(1{i wet}, 1{j wet})`.
    pub fn pair_covariance(&self, i: usize, j: usize) -> f64 {
        self.joint_pair(i, j) - self.marginal(i) * self.marginal(j)
    }

    /// Marginalize onto the given coordinates; entry `x` of the result is
    /// the probability that exactly the coordinates flagged by `x` (in
    /// `coords` order) are wet.
    pub fn project(&self, coords: &[usize]) -> Vec<f64> {
        let mut q = alloc::vec![0.0; 1 << coords.len()];
        for (&w, &p) in &self.mass {
            let mut x = 0usize;
            for (j, &v) in coords.iter().enumerate() {
                if w >> v & 1 == 1 {
                    x |= 1 << j;
                }
            }
            q[x] += p;
        }
        q
    }

    /// Distribution of the number of wet vertices outside `excluded`.
    pub fn wet_count_distribution(&self, excluded: &VertexSet) -> BTreeMap<u64, f64> {
        let ex = excluded.as_mask();
        let mut out = BTreeMap::new();
        for (&w, &p) in &self.mass {
            *out.entry((w & !ex).count_ones() as u64).or_insert(0.0) += p;
        }
        out
    }
}

/// Enumerate the joint wetness law with the default edge cap.
pub fn enumerate_joint(graph: &Graph, sources: &VertexSet) -> Result<JointDistribution, OracleError> {
    enumerate_joint_with_cap(graph, sources, DEFAULT_EDGE_CAP)
}

pub fn enumerate_joint_with_cap(
    graph: &Graph,
    sources: &VertexSet,
    edge_cap: usize,
) -> Result<JointDistribution, OracleError> {
    validate(graph, sources, edge_cap)?;
    let mut mass = BTreeMap::new();
    for chunk in 0..chunk_count(graph.edge_count()) {
        merge_mass(&mut mass, float_mass_chunk(graph, sources, chunk));
    }
    let exact = exact_mass(graph, sources);
    // In rational mode the float mass is derived from the exact one so the
    // two views cannot drift apart.
    if let Some(ref exact) = exact {
        mass = exact
            .iter()
            .map(|(&w, p)| (w, ratio_to_f64(p)))
            .collect();
    }
    Ok(JointDistribution {
        vertex_count: graph.vertex_count(),
        source: sources.clone(),
        mass,
        exact,
    })
}

pub fn validate(graph: &Graph, sources: &VertexSet, edge_cap: usize) -> Result<(), OracleError> {
    if graph.vertex_count() > VERTEX_CAP {
        return Err(OracleError::VertexCapExceeded { vertices: graph.vertex_count() });
    }
    if graph.edge_count() > edge_cap {
        return Err(OracleError::EdgeCapExceeded { edges: graph.edge_count(), cap: edge_cap });
    }
    if sources.is_empty() {
        return Err(OracleError::EmptySource);
    }
    Ok(())
}

/// Number of fixed enumeration chunks for a given edge count.
pub fn chunk_count(edge_count: usize) -> u64 {
    let total = 1u64 << edge_count;
    total.div_ceil(1 << CHUNK_BITS)
}

/// Float-mode mass contributed by orientation indices
/// `[chunk * 2^12, (chunk+1) * 2^12)`.
///
/// Building block for parallel reduction: per-chunk maps folded in chunk
/// order with [`merge_mass`] reproduce [`enumerate_joint`]'s float mass
/// exactly. Inputs must already satisfy [`validate`].
pub fn float_mass_chunk(graph: &Graph, sources: &VertexSet, chunk: u64) -> BTreeMap<u64, f64> {
    let edge_count = graph.edge_count();
    let total = 1u64 << edge_count;
    let lo = chunk << CHUNK_BITS;
    let hi = ((chunk + 1) << CHUNK_BITS).min(total);
    let reach = Reachability::new(graph);
    let source_mask = sources.as_mask();
    let factors: Vec<(f64, f64)> = graph
        .edges()
        .iter()
        .map(|e| (1.0 - e.bias, e.bias))
        .collect();
    let mut mass = BTreeMap::new();
    for index in lo..hi {
        let mut p = 1.0;
        for (e, &(away, toward)) in factors.iter().enumerate() {
            p *= if index >> e & 1 == 1 { toward } else { away };
        }
        if p == 0.0 {
            continue;
        }
        let wet = reach.wet_mask(index, source_mask);
        *mass.entry(wet).or_insert(0.0) += p;
    }
    mass
}

/// Keywise addition, `from` folded into `into`.
pub fn merge_mass(into: &mut BTreeMap<u64, f64>, from: BTreeMap<u64, f64>) {
    for (w, p) in from {
        *into.entry(w).or_insert(0.0) += p;
    }
}

/// Whether the graph qualifies for exact rational enumeration.
pub fn exact_mode_eligible(graph: &Graph) -> bool {
    graph.edge_count() <= EXACT_EDGE_CAP
        && graph.edges().iter().all(|e| {
            let scaled = e.bias * DYADIC_DENOMINATOR as f64;
            scaled == libm::floor(scaled)
        })
}

fn exact_mass(graph: &Graph, sources: &VertexSet) -> Option<BTreeMap<u64, BigRational>> {
    if !exact_mode_eligible(graph) {
        return None;
    }
    let edge_count = graph.edge_count();
    // Per-edge numerators over the common denominator 2^16.
    let numer: Vec<(u64, u64)> = graph
        .edges()
        .iter()
        .map(|e| {
            let toward = (e.bias * DYADIC_DENOMINATOR as f64) as u64;
            (DYADIC_DENOMINATOR - toward, toward)
        })
        .collect();
    let reach = Reachability::new(graph);
    let source_mask = sources.as_mask();
    let mut acc: BTreeMap<u64, BigUint> = BTreeMap::new();
    // Depth-first over edges with a running numerator product; orientation
    // probability = numerator / 2^(16 * |E|).
    let mut stack: Vec<(usize, u64, BigUint)> = alloc::vec![(0, 0, BigUint::one())];
    while let Some((depth, index, num)) = stack.pop() {
        if depth == edge_count {
            if !num.is_zero() {
                let wet = reach.wet_mask(index, source_mask);
                *acc.entry(wet).or_insert_with(BigUint::zero) += num;
            }
            continue;
        }
        let (away, toward) = numer[depth];
        stack.push((depth + 1, index, &num * away));
        stack.push((depth + 1, index | 1 << depth, &num * toward));
    }
    let denom = BigUint::one() << (16 * edge_count);
    Some(
        acc.into_iter()
            .map(|(w, n)| {
                (
                    w,
                    BigRational::new(BigInt::from(n), BigInt::from(denom.clone())),
                )
            })
            .collect(),
    )
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Bitmask-based oriented reachability for enumeration (`V <= 64`).
struct Reachability {
    // Per vertex: (neighbor, edge index, forward flag) triples.
    arcs: Vec<Vec<(usize, usize, bool)>>,
}

impl Reachability {
    fn new(graph: &Graph) -> Self {
        let mut arcs = alloc::vec![Vec::new(); graph.vertex_count()];
        for (idx, e) in graph.edges().iter().enumerate() {
            arcs[e.u].push((e.v, idx, true));
            arcs[e.v].push((e.u, idx, false));
        }
        Reachability { arcs }
    }

    fn wet_mask(&self, orientation_index: u64, source_mask: u64) -> u64 {
        let mut wet = source_mask;
        let mut stack: Vec<usize> = (0..self.arcs.len())
            .filter(|&v| source_mask >> v & 1 == 1)
            .collect();
        while let Some(x) = stack.pop() {
            for &(to, edge, forward) in &self.arcs[x] {
                if (orientation_index >> edge & 1 == 1) == forward && wet >> to & 1 == 0 {
                    wet |= 1 << to;
                    stack.push(to);
                }
            }
        }
        wet
    }
}
