//! Closed-form analytics for percolation from the leaves of the randomly
//! oriented complete binary tree of height `n`.
//!
//! Levels are indexed from the leaves: leaves are level 0, the root is
//! level `n`. Each edge is oriented toward the root with probability `p`.
//!
//! `rho[k]` is the probability that the root of a height-`k` tree gets wet
//! (equivalently, that a level-`k` vertex gets wet in downwards percolation);
//! it satisfies `rho[k+1] = 2 p rho[k] - (p rho[k])^2` with `rho[0] = 1`.
//! `alpha[k]` is the probability that water reaches a level-`k` vertex from
//! below, and `pi[k] = rho[k] + (1 - rho[k]) alpha[k]` is the wet probability
//! in the bidirectional model.

use alloc::vec::Vec;
use core::fmt;

use crate::util::{pow2, KahanSum};

#[derive(Clone, Debug, PartialEq)]
pub enum TreeError {
    InvalidBias { bias: f64 },
    LevelOutOfRange { level: u32, height: u32 },
    BoundsRequireSubcritical { bias: f64 },
    DegenerateBias { bias: f64 },
    HeightTooSmall,
    HeightCapExceeded { height: u32, cap: u32 },
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::InvalidBias { bias } => write!(f, "bias {bias} outside [0,1]"),
            TreeError::LevelOutOfRange { level, height } => {
                write!(f, "level {level} out of range for height {height}")
            }
            TreeError::BoundsRequireSubcritical { bias } => {
                write!(f, "bounds valid only for p < 1/2 (got {bias})")
            }
            TreeError::DegenerateBias { bias } => {
                write!(f, "undefined for p = {bias} (log singularity)")
            }
            TreeError::HeightTooSmall => write!(f, "height must be at least 1"),
            TreeError::HeightCapExceeded { height, cap } => {
                write!(f, "height {height} exceeds cap {cap} (override the cap to proceed)")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TreeError {}

/// Height and root-ward orientation bias of the tree model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams {
    height: u32,
    bias: f64,
}

impl TreeParams {
    pub fn new(height: u32, bias: f64) -> Result<Self, TreeError> {
        if !(0.0..=1.0).contains(&bias) {
            return Err(TreeError::InvalidBias { bias });
        }
        Ok(TreeParams { height, bias })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    fn check_level(&self, k: u32) -> Result<(), TreeError> {
        if k > self.height {
            return Err(TreeError::LevelOutOfRange { level: k, height: self.height });
        }
        Ok(())
    }
}

/// `[rho_0, ..., rho_n]` from the recurrence `rho_{k+1} = 2p rho_k - (p rho_k)^2`.
pub fn rho_sequence(params: &TreeParams) -> Vec<f64> {
    let p = params.bias;
    let mut values = Vec::with_capacity(params.height as usize + 1);
    let mut rho = 1.0;
    values.push(rho);
    for _ in 0..params.height {
        let q = p * rho;
        rho = 2.0 * q - q * q;
        values.push(rho);
    }
    values
}

/// Limit of `rho_n`: 0 for `p <= 1/2`, else `(2p - 1) / p^2`.
pub fn rho_fixed_point(p: f64) -> f64 {
    if p <= 0.5 {
        0.0
    } else {
        (2.0 * p - 1.0) / (p * p)
    }
}

/// Sandwich `e^{-2p/(1-2p)^2} (2p)^k <= rho_k <= (2p)^k`, valid for `p < 1/2`.
pub fn rho_bounds(params: &TreeParams, k: u32) -> Result<(f64, f64), TreeError> {
    params.check_level(k)?;
    let p = params.bias;
    if p >= 0.5 {
        return Err(TreeError::BoundsRequireSubcritical { bias: p });
    }
    let upper = libm::pow(2.0 * p, k as f64);
    let lower = libm::exp(-2.0 * p / ((1.0 - 2.0 * p) * (1.0 - 2.0 * p))) * upper;
    Ok((lower, upper))
}

/// Probability that water reaches a level-`k` vertex from below.
pub fn alpha(params: &TreeParams, k: u32) -> Result<f64, TreeError> {
    params.check_level(k)?;
    let rho = rho_sequence(params);
    Ok(alpha_from_rho(params, &rho, k))
}

fn alpha_from_rho(params: &TreeParams, rho: &[f64], k: u32) -> f64 {
    let (n, p) = (params.height as usize, params.bias);
    let k = k as usize;
    if k >= n {
        return 0.0; // empty sum at the root
    }
    let mut sum = KahanSum::new();
    let mut survive = 1.0; // prod_{j<i} (1 - p rho_{k+j})
    let mut down = 1.0; // (1 - p)^i
    for i in 0..=(n - 1 - k) {
        sum.add(down * rho[k + i] * survive);
        survive *= 1.0 - p * rho[k + i];
        down *= 1.0 - p;
    }
    (1.0 - p) * p * sum.value()
}

/// The same quantity via the distribution of the entry level: the highest
/// vertex on the root path that feeds water back down. Kept as an
/// independent algebraic route for cross-checking `alpha`.
pub fn alpha_from_entry_levels(params: &TreeParams, k: u32) -> Result<f64, TreeError> {
    params.check_level(k)?;
    let rho = rho_sequence(params);
    let (n, p) = (params.height as usize, params.bias);
    let k = k as usize;
    let mut sum = KahanSum::new();
    let mut down = 1.0;
    let mut survive = 1.0; // prod_{j <= i-2} (1 - p rho_{k+j})
    for i in 1..=(n - k) {
        down *= 1.0 - p;
        sum.add(down * p * rho[k + i - 1] * survive);
        survive *= 1.0 - p * rho[k + i - 1];
    }
    Ok(sum.value())
}

/// Wet probability of a level-`k` vertex in the bidirectional model.
pub fn pi(params: &TreeParams, k: u32) -> Result<f64, TreeError> {
    params.check_level(k)?;
    let rho = rho_sequence(params);
    let r = rho[k as usize];
    Ok(r + (1.0 - r) * alpha_from_rho(params, &rho, k))
}

/// Expected downwards-cluster size `sum_k 2^{n-k} rho_k` (leaves excluded).
pub fn expected_downwards(params: &TreeParams) -> f64 {
    let rho = rho_sequence(params);
    let n = params.height;
    let mut sum = KahanSum::new();
    for k in 1..=n {
        sum.add(pow2(n - k) * rho[k as usize]);
    }
    sum.value()
}

/// Expected bidirectional-cluster size `sum_k 2^{n-k} pi_k` (leaves excluded).
pub fn expected_cluster(params: &TreeParams) -> f64 {
    TreeAnalytics::compute(params).expected_cluster()
}

/// Exact CDF of the maximum level reached by water:
/// `P(max level < k) = (1 - rho_k)^{2^{n-k}}`, by independence of the
/// `2^{n-k}` level-`k` subtrees.
pub fn max_level_cdf(params: &TreeParams, k: u32) -> Result<f64, TreeError> {
    if k < 1 {
        return Err(TreeError::LevelOutOfRange { level: k, height: params.height });
    }
    params.check_level(k)?;
    let rho = rho_sequence(params);
    let r = rho[k as usize];
    if r >= 1.0 {
        return Ok(0.0);
    }
    // (1-r)^m with m up to 2^n, evaluated in log space for stability.
    let m = pow2(params.height - k);
    Ok(libm::exp(m * libm::log1p(-r)))
}

/// Predicted location `log(2) n / log(1/p)` of the maximum level; the limit
/// distribution concentrates on `{nint(kappa) - 1, nint(kappa)}`.
pub fn kappa(params: &TreeParams) -> Result<f64, TreeError> {
    let p = params.bias;
    if p <= 0.0 || p >= 1.0 {
        return Err(TreeError::DegenerateBias { bias: p });
    }
    Ok(core::f64::consts::LN_2 * params.height as f64 / libm::log(1.0 / p))
}

/// Nearest integer, `floor(x + 1/2)`.
pub fn nint(x: f64) -> i64 {
    libm::floor(x + 0.5) as i64
}

/// All per-level quantities computed in one pass.
#[derive(Clone, Debug)]
pub struct TreeAnalytics {
    params: TreeParams,
    rho: Vec<f64>,
    alpha: Vec<f64>,
    pi: Vec<f64>,
    expected_downwards: f64,
    expected_cluster: f64,
}

impl TreeAnalytics {
    pub fn compute(params: &TreeParams) -> Self {
        let rho = rho_sequence(params);
        let n = params.height;
        let alpha: Vec<f64> = (0..=n).map(|k| alpha_from_rho(params, &rho, k)).collect();
        let pi: Vec<f64> = (0..=n)
            .map(|k| {
                let r = rho[k as usize];
                r + (1.0 - r) * alpha[k as usize]
            })
            .collect();
        let mut down = KahanSum::new();
        let mut full = KahanSum::new();
        for k in 1..=n {
            let w = pow2(n - k);
            down.add(w * rho[k as usize]);
            full.add(w * pi[k as usize]);
        }
        TreeAnalytics {
            params: *params,
            rho,
            alpha,
            pi,
            expected_downwards: down.value(),
            expected_cluster: full.value(),
        }
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn expected_downwards(&self) -> f64 {
        self.expected_downwards
    }

    pub fn expected_cluster(&self) -> f64 {
        self.expected_cluster
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::fabs;

    fn params(n: u32, p: f64) -> TreeParams {
        TreeParams::new(n, p).unwrap()
    }

    #[test]
    fn rho_hand_values() {
        let rho = rho_sequence(&params(2, 0.5));
        assert_eq!(rho, alloc::vec![1.0, 0.75, 39.0 / 64.0]);
        assert!(rho_sequence(&params(5, 1.0)).iter().all(|&r| r == 1.0));
        let zero = rho_sequence(&params(5, 0.0));
        assert!(zero[1..].iter().all(|&r| r == 0.0));
    }

    #[test]
    fn fixed_point_values() {
        assert_eq!(rho_fixed_point(1.0), 1.0);
        assert!(fabs(rho_fixed_point(0.75) - 8.0 / 9.0) < 1e-15);
        assert_eq!(rho_fixed_point(0.5), 0.0);
    }

    #[test]
    fn supercritical_convergence() {
        let rho = rho_sequence(&params(200, 0.75));
        assert!(fabs(rho[200] - 8.0 / 9.0) <= 1e-9);
    }

    #[test]
    fn alpha_edge_cases() {
        let p = params(4, 0.5);
        assert_eq!(alpha(&p, 4).unwrap(), 0.0); // empty sum at the root
        let p0 = params(4, 0.0);
        for k in 0..=4 {
            assert_eq!(alpha(&p0, k).unwrap(), 0.0);
        }
        assert!(alpha(&p, 5).is_err());
    }

    #[test]
    fn alpha_routes_agree() {
        for &p in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let params = params(8, p);
            for k in 0..=8 {
                let a = alpha(&params, k).unwrap();
                let b = alpha_from_entry_levels(&params, k).unwrap();
                assert!(fabs(a - b) < 1e-12, "p={p} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pi_at_root_equals_rho() {
        for &p in &[0.25, 0.5, 0.75] {
            let tp = params(5, p);
            let rho = rho_sequence(&tp);
            assert_eq!(pi(&tp, 5).unwrap(), rho[5]);
        }
        let one = params(3, 1.0);
        for k in 0..=3 {
            assert_eq!(pi(&one, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn expected_sizes_hand_values() {
        // p=1, n=2: all 3 non-leaf vertices wet.
        assert_eq!(expected_downwards(&params(2, 1.0)), 3.0);
        assert_eq!(expected_cluster(&params(2, 1.0)), 3.0);
        // p=1/2, n=2: E|C_down| = 2*(3/4) + 39/64 = 135/64.
        assert!(fabs(expected_downwards(&params(2, 0.5)) - 135.0 / 64.0) < 1e-15);
        assert_eq!(expected_downwards(&params(3, 0.0)), 0.0);
        // n=0: the root is a leaf, clusters are empty.
        assert_eq!(expected_downwards(&params(0, 0.7)), 0.0);
        assert_eq!(expected_cluster(&params(0, 0.7)), 0.0);
        // Downwards cluster is contained in the bidirectional one.
        let tp = params(6, 0.4);
        assert!(expected_downwards(&tp) <= expected_cluster(&tp));
    }

    #[test]
    fn rho_sandwich() {
        let tp = params(10, 0.1);
        let rho = rho_sequence(&tp);
        for k in 0..=10 {
            let (lo, hi) = rho_bounds(&tp, k).unwrap();
            assert!(lo <= rho[k as usize] && rho[k as usize] <= hi, "k={k}");
        }
        // Hand value from the proposition: p=0.1, k=3.
        let (lo, hi) = rho_bounds(&tp, 3).unwrap();
        assert!(fabs(hi - 0.008) < 1e-15);
        assert!(fabs(lo - libm::exp(-0.2 / 0.64) * 0.008) < 1e-15);
        assert!(rho_bounds(&params(5, 0.5), 1).is_err());
    }

    #[test]
    fn max_level_cdf_degenerate() {
        let one = params(5, 1.0);
        for k in 1..=5 {
            assert_eq!(max_level_cdf(&one, k).unwrap(), 0.0);
        }
        let zero = params(5, 0.0);
        for k in 1..=5 {
            assert_eq!(max_level_cdf(&zero, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn kappa_values() {
        // p = 2^-n gives kappa = 1.
        let tp = params(10, libm::exp2(-10.0));
        assert!(fabs(kappa(&tp).unwrap() - 1.0) < 1e-12);
        let tp = params(20, 0.05);
        let k = kappa(&tp).unwrap();
        assert!(fabs(k - 4.62756) < 1e-4);
        assert_eq!(nint(k), 5);
        assert!(kappa(&params(5, 0.0)).is_err());
        assert!(kappa(&params(5, 1.0)).is_err());
    }

    #[test]
    fn recurrence_consistency() {
        for &p in &[0.2, 0.5, 0.8] {
            let tp = params(50, p);
            let rho = rho_sequence(&tp);
            for k in 0..50 {
                let q = p * rho[k];
                assert_eq!(rho[k + 1], 2.0 * q - q * q);
            }
        }
    }
}
