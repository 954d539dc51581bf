//! Finite simple graphs whose edges carry an orientation bias, plus
//! orientation sampling and oriented reachability.
//!
//! An edge `(u, v, bias)` is oriented `u -> v` with probability `bias`,
//! independently of every other edge. Edge order is load order and is the
//! canonical RNG draw order, so a fixed seed reproduces the same
//! [`Orientation`] regardless of anything else.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    SelfLoop { u: usize },
    DuplicateEdge { u: usize, v: usize },
    VertexOutOfRange { id: usize, vertex_count: usize },
    BiasOutOfRange { bias: f64 },
    EmptyVertexSet,
    EmptySource,
    OrientationMismatch { expected: usize, got: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::SelfLoop { u } => write!(f, "self-loop at vertex {u}"),
            GraphError::DuplicateEdge { u, v } => write!(f, "duplicate edge {{{u},{v}}}"),
            GraphError::VertexOutOfRange { id, vertex_count } => {
                write!(f, "vertex id {id} out of range (vertex count {vertex_count})")
            }
            GraphError::BiasOutOfRange { bias } => {
                write!(f, "orientation bias {bias} outside [0,1]")
            }
            GraphError::EmptyVertexSet => write!(f, "graph must have at least one vertex"),
            GraphError::EmptySource => write!(f, "empty source"),
            GraphError::OrientationMismatch { expected, got } => {
                write!(f, "orientation has {got} bits, graph has {expected} edges")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// A set of vertex ids, stored as a bit-vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    blocks: Vec<u64>,
    vertex_count: usize,
}

impl VertexSet {
    pub fn new(vertex_count: usize) -> Self {
        VertexSet {
            blocks: vec![0; vertex_count.div_ceil(64)],
            vertex_count,
        }
    }

    pub fn singleton(vertex_count: usize, v: usize) -> Self {
        let mut s = Self::new(vertex_count);
        s.insert(v);
        s
    }

    pub fn from_ids(vertex_count: usize, ids: &[usize]) -> Self {
        let mut s = Self::new(vertex_count);
        for &v in ids {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.vertex_count, "vertex id out of range");
        self.blocks[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.vertex_count && self.blocks[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.blocks
            .iter()
            .zip(other.blocks.iter())
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count).filter(move |&v| self.contains(v))
    }

    /// The set as a bitmask; only valid for `vertex_count <= 64`.
    pub fn as_mask(&self) -> u64 {
        debug_assert!(self.vertex_count <= 64);
        self.blocks.first().copied().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Probability that the edge is oriented `u -> v`.
    pub bias: f64,
}

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    edge: usize,
    /// True when this arc leaves the edge's stored `u` endpoint.
    forward: bool,
}

/// An undirected simple graph with per-edge orientation biases.
///
/// Immutable after construction; safe to share across threads.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Arc>>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut seen: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); vertex_count];
        for (idx, &(u, v, bias)) in edges.iter().enumerate() {
            if u >= vertex_count {
                return Err(GraphError::VertexOutOfRange { id: u, vertex_count });
            }
            if v >= vertex_count {
                return Err(GraphError::VertexOutOfRange { id: v, vertex_count });
            }
            if u == v {
                return Err(GraphError::SelfLoop { u });
            }
            if !(0.0..=1.0).contains(&bias) {
                return Err(GraphError::BiasOutOfRange { bias });
            }
            let key = (u.min(v), u.max(v));
            if seen.contains(&key) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            seen.push(key);
            out.push(Edge { u, v, bias });
            adj[u].push(Arc { to: v, edge: idx, forward: true });
            adj[v].push(Arc { to: u, edge: idx, forward: false });
        }
        Ok(Graph { vertex_count, edges: out, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The graph with every orientation bias complemented. Applying twice is
    /// the identity; reachability from `T` here matches reachability to `T`
    /// in the original graph.
    pub fn reversed(&self) -> Graph {
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.u, e.v, 1.0 - e.bias))
            .collect();
        Graph::new(self.vertex_count, &edges).expect("reversal preserves validity")
    }

    /// Orient every edge independently, `u -> v` with probability `bias`.
    /// One `u64` draw per edge, in edge order.
    pub fn sample_orientation<R: RngCore>(&self, rng: &mut R) -> Orientation {
        let bits = self
            .edges
            .iter()
            .map(|e| sample_bernoulli(rng, e.bias))
            .collect();
        Orientation { bits }
    }

    /// All vertices reachable from `sources` along oriented edges
    /// (multi-source BFS, `O(V + E)`).
    pub fn reachable_from(
        &self,
        orientation: &Orientation,
        sources: &VertexSet,
    ) -> Result<VertexSet, GraphError> {
        if orientation.bits.len() != self.edges.len() {
            return Err(GraphError::OrientationMismatch {
                expected: self.edges.len(),
                got: orientation.bits.len(),
            });
        }
        if sources.is_empty() {
            return Err(GraphError::EmptySource);
        }
        let mut wet = VertexSet::new(self.vertex_count);
        let mut queue = VecDeque::new();
        for v in sources.iter() {
            wet.insert(v);
            queue.push_back(v);
        }
        while let Some(x) = queue.pop_front() {
            for arc in &self.adj[x] {
                // The arc is usable when the edge points away from `x`.
                if orientation.bits[arc.edge] == arc.forward && !wet.contains(arc.to) {
                    wet.insert(arc.to);
                    queue.push_back(arc.to);
                }
            }
        }
        Ok(wet)
    }

    /// Parse the line-oriented graph text format:
    ///
    /// ```text
    /// vertices N
    /// edge u v p
    /// ```
    ///
    /// `p` is optional and defaults to 0.5. Lines starting with `#` and blank
    /// lines are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut vertex_count: Option<usize> = None;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            match tokens.next() {
                Some("vertices") => {
                    if vertex_count.is_some() {
                        return Err(ParseError::new(line, "duplicate 'vertices' line"));
                    }
                    let n: usize = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line, "missing vertex count"))?
                        .parse()
                        .map_err(|_| ParseError::new(line, "invalid vertex count"))?;
                    if n == 0 {
                        return Err(ParseError::new(line, "vertex count must be positive"));
                    }
                    vertex_count = Some(n);
                }
                Some("edge") => {
                    let n = vertex_count
                        .ok_or_else(|| ParseError::new(line, "edge before 'vertices' line"))?;
                    let u: usize = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line, "missing edge endpoint"))?
                        .parse()
                        .map_err(|_| ParseError::new(line, "invalid edge endpoint"))?;
                    let v: usize = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line, "missing edge endpoint"))?
                        .parse()
                        .map_err(|_| ParseError::new(line, "invalid edge endpoint"))?;
                    let bias: f64 = match tokens.next() {
                        Some(t) => t
                            .parse()
                            .map_err(|_| ParseError::new(line, "invalid bias"))?,
                        None => 0.5,
                    };
                    // Validate here so the error can name the line.
                    if u >= n || v >= n {
                        return Err(ParseError::new(line, "edge endpoint out of range"));
                    }
                    if u == v {
                        return Err(ParseError::new(line, "self-loop"));
                    }
                    if !(0.0..=1.0).contains(&bias) {
                        return Err(ParseError::new(line, "bias outside [0,1]"));
                    }
                    if edges
                        .iter()
                        .any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u))
                    {
                        return Err(ParseError::new(line, "duplicate edge"));
                    }
                    edges.push((u, v, bias));
                }
                Some(other) => {
                    return Err(ParseError {
                        line,
                        message: alloc::format!("unknown directive '{other}'"),
                    });
                }
                None => unreachable!(),
            }
            if tokens.next().is_some() {
                return Err(ParseError::new(line, "trailing tokens"));
            }
        }
        let vertex_count =
            vertex_count.ok_or_else(|| ParseError::new(0, "missing 'vertices' line"))?;
        Graph::new(vertex_count, &edges).map_err(|e| ParseError {
            line: 0,
            message: alloc::format!("{e}"),
        })
    }
}

/// One boolean per edge, in the graph's edge order; `true` means `u -> v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    bits: Vec<bool>,
}

impl Orientation {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Orientation { bits }
    }

    /// Orientation number `index` in edge-index-major binary counting: bit
    /// `e` of `index` orients edge `e`.
    pub fn from_index(edge_count: usize, index: u64) -> Self {
        debug_assert!(edge_count <= 64);
        Orientation {
            bits: (0..edge_count).map(|e| index >> e & 1 == 1).collect(),
        }
    }

    pub fn bit(&self, edge: usize) -> bool {
        self.bits[edge]
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Draw a Bernoulli(`bias`) bit from one `u64`. Bias 0 and 1 are exact.
pub(crate) fn sample_bernoulli<R: RngCore>(rng: &mut R, bias: f64) -> bool {
    match bernoulli_threshold(bias) {
        None => bias >= 1.0,
        Some(t) => rng.next_u64() < t,
    }
}

/// Threshold such that `u64 < t` has probability `bias`; `None` for the
/// degenerate biases 0 and 1 (no draw needed -- but callers that must keep
/// the draw order fixed still consume one `u64`).
pub(crate) fn bernoulli_threshold(bias: f64) -> Option<u64> {
    if bias <= 0.0 || bias >= 1.0 {
        None
    } else {
        Some((bias * (u64::MAX as f64 + 1.0)) as u64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: &str) -> Self {
        ParseError {
            line,
            message: String::from(message),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}
