//! Machine-readable report emission: JSON documents and CSV tables.
//!
//! Every JSON document is a pure function of the command inputs except the
//! optional `timestamp` field (unix seconds), which callers suppress for
//! byte-identical re-runs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use oriperc_core::assoc::{AssociationReport, Witness};
use oriperc_core::oracle::JointDistribution;
use oriperc_core::poisson::PoissonDiagnostics;
use oriperc_core::tree::{kappa, max_level_cdf, nint, rho_fixed_point, TreeAnalytics};
use oriperc_core::treesim::MCSummary;
use serde_json::{json, Map, Value};

use crate::mc::GraphMCSummary;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact cluster sizes are kept up to this value in CSV histograms; larger
/// sizes are bucketed by powers of two (in-memory counts stay exact).
const CSV_EXACT_MAX: u64 = 1 << 16;

fn maybe_timestamp(doc: &mut Map<String, Value>, with_timestamp: bool) {
    if with_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc.insert("timestamp".into(), json!(secs));
    }
}

fn witness_json(w: &Option<Witness>) -> Value {
    match w {
        None => Value::Null,
        Some(Witness::UpSetPair { first, second }) => json!({
            "type": "upset-pair",
            "first": first,
            "second": second,
        }),
        Some(Witness::ConditionalUpSet { vertex, upset }) => json!({
            "type": "conditional-upset",
            "vertex": vertex,
            "upset": upset,
        }),
    }
}

pub fn association_json(report: &AssociationReport) -> Value {
    json!({
        "passed": report.passed,
        "min_covariance": report.min_covariance,
        "witness": witness_json(&report.witness),
        "checks_performed": report.checks_performed,
        "window": report.window,
        "skipped": report.skipped,
        "tolerance": report.tolerance,
    })
}

/// Full `check` report: the joint law plus both checks and the pairwise
/// covariance scan.
#[allow(clippy::too_many_arguments)]
pub fn check_json(
    dist: &JointDistribution,
    association: &AssociationReport,
    relation: &AssociationReport,
    min_pairwise: f64,
    min_pair: (usize, usize),
    with_timestamp: bool,
) -> Value {
    let mass: Map<String, Value> = dist
        .mass()
        .iter()
        .map(|(&w, &p)| (format!("{w:#x}"), json!(p)))
        .collect();
    let marginals: Vec<f64> = (0..dist.vertex_count()).map(|i| dist.marginal(i)).collect();
    let marginals_exact: Value = if dist.is_exact() {
        json!((0..dist.vertex_count())
            .map(|i| dist.marginal_exact(i).expect("exact mode").to_string())
            .collect::<Vec<String>>())
    } else {
        Value::Null
    };
    let mut doc = Map::new();
    doc.insert("vertices".into(), json!(dist.vertex_count()));
    doc.insert("sources".into(), json!(dist.source().iter().collect::<Vec<usize>>()));
    doc.insert("exact".into(), json!(dist.is_exact()));
    doc.insert("mass".into(), Value::Object(mass));
    doc.insert("marginals".into(), json!(marginals));
    doc.insert("marginals_exact".into(), marginals_exact);
    doc.insert("association".into(), association_json(association));
    doc.insert("relation".into(), association_json(relation));
    doc.insert(
        "pairwise".into(),
        json!({ "min_covariance": min_pairwise, "pair": [min_pair.0, min_pair.1] }),
    );
    doc.insert("passed".into(), json!(association.passed && relation.passed));
    doc.insert("version".into(), json!(CODE_VERSION));
    maybe_timestamp(&mut doc, with_timestamp);
    Value::Object(doc)
}

/// Marginal table for `check --format csv`.
pub fn check_csv(dist: &JointDistribution) -> String {
    let mut out = String::from("vertex,marginal\n");
    for i in 0..dist.vertex_count() {
        out.push_str(&format!("{i},{}\n", dist.marginal(i)));
    }
    out
}

/// Per-level analytic table: `k, rho_k, alpha_k, pi_k, 2^{n-k} * pi_k`.
pub fn analytics_csv(analytics: &TreeAnalytics) -> String {
    let n = analytics.params().height();
    let mut out = String::from("k,rho_k,alpha_k,pi_k,weighted_pi\n");
    for k in 0..=n {
        let weight = 2f64.powi((n - k) as i32);
        out.push_str(&format!(
            "{k},{},{},{},{}\n",
            analytics.rho()[k as usize],
            analytics.alpha()[k as usize],
            analytics.pi()[k as usize],
            weight * analytics.pi()[k as usize],
        ));
    }
    out
}

pub fn analytics_json(analytics: &TreeAnalytics, with_timestamp: bool) -> Value {
    let params = analytics.params();
    let (n, p) = (params.height(), params.bias());
    let mut doc = Map::new();
    doc.insert("n".into(), json!(n));
    doc.insert("p".into(), json!(p));
    doc.insert("expected_downwards".into(), json!(analytics.expected_downwards()));
    doc.insert("expected_cluster".into(), json!(analytics.expected_cluster()));
    doc.insert("fixed_point".into(), json!(rho_fixed_point(p)));
    doc.insert("rho_root".into(), json!(analytics.rho()[n as usize]));
    match kappa(params) {
        Ok(k) => {
            doc.insert("kappa".into(), json!(k));
            let m = nint(k);
            // CDF around the predicted two-point support {nint-1, nint}.
            let mut cdf = Map::new();
            for level in [m - 1, m, m + 1] {
                if level >= 1 && level <= n as i64 {
                    let c = max_level_cdf(params, level as u32).expect("level in range");
                    cdf.insert(level.to_string(), json!(c));
                }
            }
            // P(max_level in {nint-1, nint}) when both CDF endpoints exist.
            if m - 1 >= 1 && m + 1 <= n as i64 {
                let hi = max_level_cdf(params, (m + 1) as u32).expect("in range");
                let lo = max_level_cdf(params, (m - 1) as u32).expect("in range");
                doc.insert("two_point_mass".into(), json!(hi - lo));
            }
            doc.insert("max_level_cdf".into(), Value::Object(cdf));
        }
        Err(_) => {
            doc.insert("kappa".into(), Value::Null);
        }
    }
    doc.insert("version".into(), json!(CODE_VERSION));
    maybe_timestamp(&mut doc, with_timestamp);
    Value::Object(doc)
}

pub fn mc_summary_json(summary: &MCSummary, with_timestamp: bool) -> Value {
    let histogram: Map<String, Value> = summary
        .histogram
        .iter()
        .map(|(&k, &c)| (k.to_string(), json!(c)))
        .collect();
    let max_levels: Map<String, Value> = summary
        .max_level_counts
        .iter()
        .map(|(&k, &c)| (k.to_string(), json!(c)))
        .collect();
    let mut doc = Map::new();
    doc.insert("n".into(), json!(summary.height));
    doc.insert("p".into(), json!(summary.bias));
    doc.insert("samples".into(), json!(summary.samples));
    doc.insert("seed".into(), json!(summary.seed));
    doc.insert("generator".into(), json!(summary.generator));
    doc.insert("mean_cluster".into(), json!(summary.mean_cluster));
    doc.insert("var_cluster".into(), json!(summary.var_cluster));
    doc.insert("mean_downwards".into(), json!(summary.mean_downwards));
    doc.insert("var_downwards".into(), json!(summary.var_downwards));
    doc.insert("root_wet_frequency".into(), json!(summary.root_wet_frequency));
    doc.insert("histogram".into(), Value::Object(histogram));
    doc.insert("max_level_counts".into(), Value::Object(max_levels));
    doc.insert("version".into(), json!(CODE_VERSION));
    maybe_timestamp(&mut doc, with_timestamp);
    Value::Object(doc)
}

/// `value,count` rows; cluster sizes above 2^16 fall into power-of-two
/// buckets labeled by their lower bound.
pub fn histogram_csv(histogram: &BTreeMap<u64, u64>) -> String {
    let mut exact: BTreeMap<u64, u64> = BTreeMap::new();
    for (&k, &c) in histogram {
        let key = if k <= CSV_EXACT_MAX { k } else { 1 << k.ilog2() };
        *exact.entry(key).or_insert(0) += c;
    }
    let mut out = String::from("value,count\n");
    for (k, c) in exact {
        out.push_str(&format!("{k},{c}\n"));
    }
    out
}

pub fn max_level_csv(counts: &BTreeMap<u32, u64>) -> String {
    let mut out = String::from("value,count\n");
    for (&k, &c) in counts {
        out.push_str(&format!("{k},{c}\n"));
    }
    out
}

/// Combined CSV for `tree-simulate`: the cluster-size histogram and the
/// max-level counts as two labeled blocks.
pub fn mc_summary_csv(summary: &MCSummary) -> String {
    let mut out = String::from("# cluster_size histogram\n");
    out.push_str(&histogram_csv(&summary.histogram));
    out.push_str("\n# max_level counts\n");
    out.push_str(&max_level_csv(&summary.max_level_counts));
    out
}

pub fn graph_mc_json(summary: &GraphMCSummary, sources: &[usize], with_timestamp: bool) -> Value {
    let freqs: Vec<f64> = (0..summary.vertex_count).map(|v| summary.wet_frequency(v)).collect();
    let mut doc = Map::new();
    doc.insert("vertices".into(), json!(summary.vertex_count));
    doc.insert("sources".into(), json!(sources));
    doc.insert("samples".into(), json!(summary.samples));
    doc.insert("seed".into(), json!(summary.seed));
    doc.insert("generator".into(), json!(summary.generator));
    doc.insert("wet_frequency".into(), json!(freqs));
    doc.insert("version".into(), json!(CODE_VERSION));
    maybe_timestamp(&mut doc, with_timestamp);
    Value::Object(doc)
}

pub fn graph_mc_csv(summary: &GraphMCSummary) -> String {
    let mut out = String::from("vertex,wet_frequency\n");
    for v in 0..summary.vertex_count {
        out.push_str(&format!("{v},{}\n", summary.wet_frequency(v)));
    }
    out
}

pub fn poisson_json(diag: &PoissonDiagnostics, n: u32, p: f64, seed: u64, with_timestamp: bool) -> Value {
    let mut doc = Map::new();
    doc.insert("n".into(), json!(n));
    doc.insert("p".into(), json!(p));
    doc.insert("lambda".into(), json!(diag.lambda));
    doc.insert("variance".into(), json!(diag.variance));
    doc.insert("variance_source".into(), json!(diag.variance_source.as_str()));
    doc.insert("sum_p_squared".into(), json!(diag.sum_p_squared));
    doc.insert("stein_chen_bound".into(), json!(diag.stein_chen_bound));
    doc.insert("bound_clamped".into(), json!(diag.bound_clamped));
    doc.insert("empirical_tv".into(), json!(diag.empirical_tv));
    doc.insert("samples".into(), json!(diag.samples));
    doc.insert("seed".into(), json!(seed));
    doc.insert("generator".into(), json!(diag.generator));
    doc.insert("version".into(), json!(CODE_VERSION));
    maybe_timestamp(&mut doc, with_timestamp);
    Value::Object(doc)
}

/// Empirical vs Poisson pmf table for plotting.
pub fn poisson_csv(histogram: &BTreeMap<u64, u64>, samples: u64, lambda: f64) -> String {
    let top = histogram.keys().next_back().copied().unwrap_or(0) + 1;
    let mut out = String::from("k,empirical,poisson\n");
    for k in 0..=top {
        let h = histogram.get(&k).map(|&c| c as f64 / samples as f64).unwrap_or(0.0);
        out.push_str(&format!("{k},{h},{}\n", oriperc_core::poisson::poisson_pmf(lambda, k)));
    }
    out
}

pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Write to the given path, or stdout when absent.
pub fn write_output(out: Option<&Path>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}
