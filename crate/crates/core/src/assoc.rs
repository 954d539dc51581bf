//! Positive-association and positive-relation checks over a
//! [`JointDistribution`], exhaustive over the complete up-set family of a
//! window of at most 5 free coordinates.
//!
//! An increasing real function on `{0,1}^k` is a nonnegative combination of
//! up-set indicators plus a constant, so checking `Cov(1_U, 1_W) >= 0` over
//! all up-set pairs is equivalent to checking all increasing pairs. Nuisance
//! coordinates are marginalized out rather than failing on larger graphs;
//! positive association is preserved under taking sub-vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::oracle::{JointDistribution, OracleError};
use crate::upsets::{enumerate_upsets, MAX_GROUND_SIZE};

/// Tolerance on "covariance >= 0" in double mode: rounding can accumulate
/// across 2^|E| enumeration terms.
pub const ASSOCIATION_TOLERANCE: f64 = 1e-12;

/// The minimizing witness of a failed (or near-zero) check.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Up-set pair achieving the minimum covariance, as point lists over the
    /// free-coordinate window.
    UpSetPair { first: Vec<u32>, second: Vec<u32> },
    /// Up-set and conditioning vertex achieving the minimum domination
    /// margin `P(U | X_v = 1) - P(U)`.
    ConditionalUpSet { vertex: usize, upset: Vec<u32> },
}

#[derive(Clone, Debug)]
pub struct AssociationReport {
    pub passed: bool,
    /// Minimum covariance (association) or domination margin (relation)
    /// found across all checks.
    pub min_covariance: f64,
    pub witness: Option<Witness>,
    pub checks_performed: u64,
    /// Window of free vertices the check ran over.
    pub window: Vec<usize>,
    /// Vertices skipped because their conditioning event has zero
    /// probability (relation check only).
    pub skipped: Vec<usize>,
    pub tolerance: f64,
}

/// `Cov(1_U, 1_W) >= -tolerance` for every pair of up-sets `U`, `W` over the
/// free coordinates, marginalizing everything else.
pub fn check_positive_association(
    dist: &JointDistribution,
    free_vertices: &[usize],
) -> Result<AssociationReport, OracleError> {
    let window = checked_window(dist, free_vertices)?;
    let family = enumerate_upsets(window.len()).expect("window within up-set cap");
    let q = dist.project(&window);
    let sums = SubsetSums::new(&q);
    let masks = family.masks();
    let probs: Vec<f64> = masks.iter().map(|&m| sums.sum(m)).collect();

    let mut min_cov = f64::INFINITY;
    let mut argmin = (0usize, 0usize);
    let mut checks = 0u64;
    for i in 0..masks.len() {
        for j in i..masks.len() {
            let cov = sums.sum(masks[i] & masks[j]) - probs[i] * probs[j];
            checks += 1;
            if cov < min_cov {
                min_cov = cov;
                argmin = (i, j);
            }
        }
    }
    let witness = Witness::UpSetPair {
        first: family.points(masks[argmin.0]),
        second: family.points(masks[argmin.1]),
    };
    Ok(AssociationReport {
        passed: min_cov >= -ASSOCIATION_TOLERANCE,
        min_covariance: min_cov,
        witness: Some(witness),
        checks_performed: checks,
        window,
        skipped: Vec::new(),
        tolerance: ASSOCIATION_TOLERANCE,
    })
}

/// For each free vertex `v` with `P(X_v = 1) > 0`, the law of the window
/// conditioned on `{X_v = 1}` must stochastically dominate the unconditioned
/// law: `P(U | X_v = 1) >= P(U) - tolerance` for every up-set `U`. On a
/// finite ordered space this domination is equivalent to the existence of
/// the monotone coupling that defines positive relation.
pub fn check_positive_relation(
    dist: &JointDistribution,
    free_vertices: &[usize],
) -> Result<AssociationReport, OracleError> {
    let window = checked_window(dist, free_vertices)?;
    let family = enumerate_upsets(window.len()).expect("window within up-set cap");
    let q = dist.project(&window);
    let sums = SubsetSums::new(&q);
    let masks = family.masks();
    let probs: Vec<f64> = masks.iter().map(|&m| sums.sum(m)).collect();

    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    let mut checks = 0u64;
    let mut skipped = Vec::new();
    for (coord, &v) in window.iter().enumerate() {
        // Restrict to the event {coordinate `coord` wet}.
        let p_v: f64 = (0..q.len()).filter(|x| x >> coord & 1 == 1).map(|x| q[x]).sum();
        if p_v <= 0.0 {
            skipped.push(v);
            continue;
        }
        let cond: Vec<f64> = (0..q.len())
            .map(|x| if x >> coord & 1 == 1 { q[x] / p_v } else { 0.0 })
            .collect();
        let cond_sums = SubsetSums::new(&cond);
        for (i, &m) in masks.iter().enumerate() {
            let margin = cond_sums.sum(m) - probs[i];
            checks += 1;
            if margin < min_margin {
                min_margin = margin;
                witness = Some(Witness::ConditionalUpSet {
                    vertex: v,
                    upset: family.points(m),
                });
            }
        }
    }
    if checks == 0 {
        // Every vertex skipped: domination holds vacuously.
        min_margin = 0.0;
    }
    Ok(AssociationReport {
        passed: min_margin >= -ASSOCIATION_TOLERANCE,
        min_covariance: min_margin,
        witness,
        checks_performed: checks,
        window,
        skipped,
        tolerance: ASSOCIATION_TOLERANCE,
    })
}

/// Default free-vertex window: vertices outside the source whose marginal is
/// not almost-surely determined, truncated to the first `max`.
pub fn default_free_window(dist: &JointDistribution, max: usize) -> Vec<usize> {
    (0..dist.vertex_count())
        .filter(|&v| !dist.source().contains(v))
        .filter(|&v| {
            let p = dist.marginal(v);
            p > ASSOCIATION_TOLERANCE && p < 1.0 - ASSOCIATION_TOLERANCE
        })
        .take(max)
        .collect()
}

fn checked_window(
    dist: &JointDistribution,
    free_vertices: &[usize],
) -> Result<Vec<usize>, OracleError> {
    if free_vertices.len() > MAX_GROUND_SIZE {
        return Err(OracleError::WindowTooLarge {
            size: free_vertices.len(),
            cap: MAX_GROUND_SIZE,
        });
    }
    let mut window: Vec<usize> = free_vertices.to_vec();
    window.sort_unstable();
    window.dedup();
    debug_assert!(window.iter().all(|&v| v < dist.vertex_count()));
    Ok(window)
}

/// O(1) subset sums of a point-mass vector over up to 32 points, via two
/// 16-bit lookup tables.
struct SubsetSums {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SubsetSums {
    fn new(q: &[f64]) -> Self {
        let points = q.len();
        debug_assert!(points <= 32);
        let lo_bits = points.min(16);
        let hi_bits = points.saturating_sub(16);
        SubsetSums {
            lo: Self::table(&q[..lo_bits]),
            hi: Self::table(&q[lo_bits..lo_bits + hi_bits]),
        }
    }

    fn table(weights: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; 1 << weights.len()];
        for (b, &w) in weights.iter().enumerate() {
            for s in 0..1usize << b {
                t[s | 1 << b] = t[s] + w;
            }
        }
        t
    }

    #[inline]
    fn sum(&self, mask: u32) -> f64 {
        let lo = (mask & 0xFFFF) as usize & (self.lo.len() - 1);
        let hi = (mask >> 16) as usize & (self.hi.len() - 1);
        self.lo[lo] + self.hi[hi]
    }
}

/// Convenience: run the association check over the default window.
pub fn check_default_association(
    dist: &JointDistribution,
) -> Result<AssociationReport, OracleError> {
    let window = default_free_window(dist, MAX_GROUND_SIZE);
    check_positive_association(dist, &window)
}

/// Convenience: run the relation check over the default window.
pub fn check_default_relation(dist: &JointDistribution) -> Result<AssociationReport, OracleError> {
    let window = default_free_window(dist, MAX_GROUND_SIZE);
    check_positive_relation(dist, &window)
}

/// Minimum pairwise indicator covariance over pairs of vertices that are not
/// almost surely determined (constant indicators covary trivially by 0);
/// positive association implies this is `>= -tolerance`.
pub fn min_pair_covariance(dist: &JointDistribution) -> (f64, (usize, usize)) {
    let n = dist.vertex_count();
    let marginals: Vec<f64> = (0..n).map(|i| dist.marginal(i)).collect();
    let free = |i: usize| {
        marginals[i] > ASSOCIATION_TOLERANCE && marginals[i] < 1.0 - ASSOCIATION_TOLERANCE
    };
    let mut min = f64::INFINITY;
    let mut arg = (0, 0);
    for i in (0..n).filter(|&i| free(i)) {
        for j in (i + 1..n).filter(|&j| free(j)) {
            let cov = dist.joint_pair(i, j) - marginals[i] * marginals[j];
            if cov < min {
                min = cov;
                arg = (i, j);
            }
        }
    }
    if !min.is_finite() {
        min = 0.0;
    }
    (min, arg)
}
