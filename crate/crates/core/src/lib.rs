//! Percolation on graphs with independently random edge orientations.
//!
//! The crate has four parts:
//!
//! * [`graph`] — finite simple graphs with per-edge orientation bias,
//!   orientation sampling and oriented reachability;
//! * [`oracle`] / [`upsets`] / [`assoc`] — exact enumeration of the joint law
//!   of the wetness indicators `{S ⇝ i}` over all `2^|E|` orientations, and
//!   positive-association / positive-relation checks via up-set families;
//! * [`tree`] — closed-form analytics for percolation from the leaves of the
//!   randomly oriented complete binary tree (root-wetting recurrence,
//!   threshold, wet-probability tables, expected cluster sizes, max-level
//!   distribution);
//! * [`treesim`] / [`poisson`] — a fast seeded single-run simulator for the
//!   tree model and Stein–Chen Poisson-approximation diagnostics.
//!
//! The crate is `no_std` (with `alloc`); IO, parallel drivers and the CLI
//! live in the companion `oriperc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod assoc;
pub mod corpus;
pub mod graph;
pub mod oracle;
pub mod poisson;
pub mod tree;
pub mod treesim;
pub mod upsets;

pub(crate) mod util;

pub use graph::{Graph, GraphError, Orientation, ParseError, VertexSet};
pub use oracle::{enumerate_joint, JointDistribution, OracleError};
pub use tree::{TreeAnalytics, TreeError, TreeParams};
pub use treesim::{MCSummary, TreeAccumulator, TreeRun, TreeSim};
