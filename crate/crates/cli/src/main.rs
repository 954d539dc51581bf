//! `oriperc`: percolation on randomly oriented graphs.
//!
//! Exit codes: 0 success (all checks pass), 1 validation/usage error,
//! 2 a verification check failed (a would-be counterexample).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oriperc_core::assoc::{check_default_association, check_default_relation, min_pair_covariance};
use oriperc_core::graph::{Graph, VertexSet};
use oriperc_core::oracle::enumerate_joint;
use oriperc_core::poisson::{
    empirical_tv_poisson, stein_chen_bound, sum_pi_squared_from, PoissonDiagnostics,
    VarianceSource,
};
use oriperc_core::tree::{TreeAnalytics, TreeParams};
use oriperc_core::treesim::{DEFAULT_HEIGHT_CAP, GENERATOR_NAME};
use oriperc::mc::{
    run_graph_experiment, run_tree_experiment_with_cap, sample_poisson_histogram,
};
use oriperc::report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "oriperc", version, about = "Percolation on randomly oriented graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Suppress the timestamp field so re-runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Experiment seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (defaults to available parallelism). Results never
    /// depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact enumeration + positive-association/relation checks on a graph
    /// file.
    Check {
        /// Graph file (`vertices N` / `edge u v p` format).
        #[arg(long)]
        graph: PathBuf,
        /// Source vertex ids, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        sources: Vec<usize>,
    },
    /// Closed-form tables for the randomly oriented binary tree.
    TreeAnalytic {
        /// Tree height.
        #[arg(short)]
        n: u32,
        /// Probability an edge points toward the root.
        #[arg(short)]
        p: f64,
    },
    /// Seeded Monte Carlo over the tree model.
    TreeSimulate {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        p: f64,
        #[arg(long)]
        samples: u64,
        /// Override the default height cap.
        #[arg(long, default_value_t = DEFAULT_HEIGHT_CAP)]
        height_cap: u32,
    },
    /// Seeded Monte Carlo over a general graph.
    GraphSimulate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        sources: Vec<usize>,
        #[arg(long)]
        samples: u64,
    },
    /// Stein–Chen Poisson-approximation diagnostics for the tree model.
    Poisson {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        p: f64,
        #[arg(long)]
        samples: u64,
        /// Replace the simulated histogram by direct Poisson(lambda) draws
        /// (pipeline self-test).
        #[arg(long)]
        synthetic: bool,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err("--threads must be positive".into());
    }
    let with_timestamp = !cli.no_timestamp;
    let seed = cli.seed;

    let (content, code) = match cli.command {
        Command::Check { graph, sources } => {
            let g = load_graph(&graph)?;
            let sources = vertex_set(&g, &sources)?;
            let dist = enumerate_joint(&g, &sources).map_err(|e| e.to_string())?;
            let association = check_default_association(&dist).map_err(|e| e.to_string())?;
            let relation = check_default_relation(&dist).map_err(|e| e.to_string())?;
            let (min_cov, pair) = min_pair_covariance(&dist);
            let passed = association.passed && relation.passed;
            let content = match cli.format {
                Format::Json => report::to_pretty(&report::check_json(
                    &dist,
                    &association,
                    &relation,
                    min_cov,
                    pair,
                    with_timestamp,
                )),
                Format::Csv => report::check_csv(&dist),
            };
            (content, if passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CHECK_FAILED) })
        }
        Command::TreeAnalytic { n, p } => {
            if n < 1 {
                return Err("tree-analytic requires n >= 1".into());
            }
            let params = TreeParams::new(n, p).map_err(|e| e.to_string())?;
            let analytics = TreeAnalytics::compute(&params);
            let content = match cli.format {
                Format::Json => report::to_pretty(&report::analytics_json(&analytics, with_timestamp)),
                Format::Csv => report::analytics_csv(&analytics),
            };
            (content, ExitCode::SUCCESS)
        }
        Command::TreeSimulate { n, p, samples, height_cap } => {
            if samples < 1 {
                return Err("--samples must be at least 1".into());
            }
            let params = TreeParams::new(n, p).map_err(|e| e.to_string())?;
            let summary = run_tree_experiment_with_cap(&params, samples, seed, threads, height_cap)
                .map_err(|e| e.to_string())?;
            let content = match cli.format {
                Format::Json => {
                    report::to_pretty(&report::mc_summary_json(&summary, with_timestamp))
                }
                Format::Csv => report::mc_summary_csv(&summary),
            };
            (content, ExitCode::SUCCESS)
        }
        Command::GraphSimulate { graph, sources, samples } => {
            if samples < 1 {
                return Err("--samples must be at least 1".into());
            }
            let g = load_graph(&graph)?;
            let source_ids = sources.clone();
            let sources = vertex_set(&g, &sources)?;
            let summary = run_graph_experiment(&g, &sources, samples, seed, threads)
                .map_err(|e| e.to_string())?;
            let content = match cli.format {
                Format::Json => {
                    report::to_pretty(&report::graph_mc_json(&summary, &source_ids, with_timestamp))
                }
                Format::Csv => report::graph_mc_csv(&summary),
            };
            (content, ExitCode::SUCCESS)
        }
        Command::Poisson { n, p, samples, synthetic } => {
            if n < 1 {
                return Err("poisson requires n >= 1".into());
            }
            if samples < 1 {
                return Err("--samples must be at least 1".into());
            }
            let params = TreeParams::new(n, p).map_err(|e| e.to_string())?;
            let analytics = TreeAnalytics::compute(&params);
            let lambda = analytics.expected_cluster();
            if !(lambda > 0.0) {
                return Err(format!("lambda <= 0 (expected cluster size {lambda}); need p > 0"));
            }
            let sum_p_squared = sum_pi_squared_from(&analytics);
            let (histogram, variance): (BTreeMap<u64, u64>, f64) = if synthetic {
                let hist = sample_poisson_histogram(lambda, samples, seed);
                let var = histogram_variance(&hist, samples);
                (hist, var)
            } else {
                let summary = run_tree_experiment_with_cap(
                    &params,
                    samples,
                    seed,
                    threads,
                    DEFAULT_HEIGHT_CAP,
                )
                .map_err(|e| e.to_string())?;
                (summary.histogram, summary.var_cluster)
            };
            let bound =
                stein_chen_bound(lambda, variance, sum_p_squared).map_err(|e| e.to_string())?;
            let tv = empirical_tv_poisson(&histogram, samples, lambda).map_err(|e| e.to_string())?;
            let diag = PoissonDiagnostics {
                lambda,
                variance,
                variance_source: VarianceSource::MonteCarlo,
                sum_p_squared,
                stein_chen_bound: bound.value,
                bound_clamped: bound.clamped,
                empirical_tv: tv,
                samples,
                generator: String::from(GENERATOR_NAME),
            };
            let content = match cli.format {
                Format::Json => {
                    report::to_pretty(&report::poisson_json(&diag, n, p, seed, with_timestamp))
                }
                Format::Csv => report::poisson_csv(&histogram, samples, lambda),
            };
            (content, ExitCode::SUCCESS)
        }
    };

    report::write_output(cli.out.as_deref(), &content)
        .map_err(|e| format!("cannot write output: {e}"))?;
    Ok(code)
}

fn load_graph(path: &std::path::Path) -> Result<Graph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Graph::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn vertex_set(graph: &Graph, ids: &[usize]) -> Result<VertexSet, String> {
    if ids.is_empty() {
        return Err("empty source".into());
    }
    for &v in ids {
        if v >= graph.vertex_count() {
            return Err(format!(
                "source vertex {v} out of range (vertex count {})",
                graph.vertex_count()
            ));
        }
    }
    Ok(VertexSet::from_ids(graph.vertex_count(), ids))
}

/// Unbiased variance of a size histogram (exact integer sums).
fn histogram_variance(histogram: &BTreeMap<u64, u64>, samples: u64) -> f64 {
    if samples < 2 {
        return 0.0;
    }
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    for (&k, &c) in histogram {
        sum += k as u128 * c as u128;
        sum_sq += (k as u128) * (k as u128) * c as u128;
    }
    let n = samples as f64;
    let mean = sum as f64 / n;
    let biased = sum_sq as f64 / n - mean * mean;
    (biased * n / (n - 1.0)).max(0.0)
}
