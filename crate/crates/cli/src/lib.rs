//! Std-side companion to `oriperc-core`: parallel Monte Carlo drivers and
//! machine-readable report emission. The `oriperc` binary is a thin argument
//! parser over these.

pub mod mc;
pub mod report;

pub use mc::{
    estimate_covariance, run_graph_experiment, run_tree_experiment,
    run_tree_experiment_with_cap, sample_poisson_histogram, sample_wet_masks, GraphMCSummary,
};
