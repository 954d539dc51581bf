//! Stein–Chen Poisson-approximation diagnostics.
//!
//! For positively related indicators with sum `W`, `lambda = E[W]` and
//! marginals `p_i`, the total variation distance to `Poisson(lambda)` is at
//! most `min(1, 1/lambda) (Var W - lambda + 2 sum p_i^2)`. The tree model
//! supplies `lambda` and `sum p_i^2` analytically; the variance comes from
//! Monte Carlo (no closed form is available).

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use crate::tree::{TreeAnalytics, TreeParams};
use crate::util::{fabs, fmin, pow2, KahanSum};

#[derive(Clone, Debug, PartialEq)]
pub enum PoissonError {
    NonPositiveLambda { lambda: f64 },
    NegativeVariance { variance: f64 },
    NoSamples,
}

impl fmt::Display for PoissonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoissonError::NonPositiveLambda { lambda } => write!(f, "lambda <= 0 (got {lambda})"),
            PoissonError::NegativeVariance { variance } => {
                write!(f, "variance must be nonnegative (got {variance})")
            }
            PoissonError::NoSamples => write!(f, "at least one sample required"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PoissonError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteinChenBound {
    pub value: f64,
    /// The raw bound was negative (possible only through estimation error in
    /// the variance input) and was clamped to 0.
    pub clamped: bool,
}

/// `min(1, 1/lambda) (variance - lambda + 2 sum_p_squared)`, clamped below
/// at 0.
pub fn stein_chen_bound(
    lambda: f64,
    variance: f64,
    sum_p_squared: f64,
) -> Result<SteinChenBound, PoissonError> {
    if !(lambda > 0.0) {
        return Err(PoissonError::NonPositiveLambda { lambda });
    }
    if variance < 0.0 {
        return Err(PoissonError::NegativeVariance { variance });
    }
    let raw = fmin(1.0, 1.0 / lambda) * (variance - lambda + 2.0 * sum_p_squared);
    Ok(SteinChenBound {
        value: if raw < 0.0 { 0.0 } else { raw },
        clamped: raw < 0.0,
    })
}

/// `sum_v pi_{level(v)}^2` over the non-leaf vertices of `T_n`, i.e.
/// `sum_{k=1}^n 2^{n-k} pi_k^2`.
pub fn sum_pi_squared(params: &TreeParams) -> f64 {
    let analytics = TreeAnalytics::compute(params);
    sum_pi_squared_from(&analytics)
}

pub fn sum_pi_squared_from(analytics: &TreeAnalytics) -> f64 {
    let n = analytics.params().height();
    let pi = analytics.pi();
    let mut sum = KahanSum::new();
    for k in 1..=n {
        let p = pi[k as usize];
        sum.add(pow2(n - k) * p * p);
    }
    sum.value()
}

/// `Poisson(lambda)` pmf at `k`, evaluated in log space so large `lambda`
/// cannot overflow.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    libm::exp(log_poisson_pmf(lambda, k))
}

fn log_poisson_pmf(lambda: f64, k: u64) -> f64 {
    let mut lp = -lambda;
    let ll = libm::log(lambda);
    for i in 1..=k {
        lp += ll - libm::log(i as f64);
    }
    lp
}

/// Total variation distance between the empirical distribution
/// `histogram / samples` and `Poisson(lambda)`:
/// half the L1 distance up to a cutoff `K` past both supports, plus half the
/// tail mass beyond `K` of both distributions. `K` is chosen so the Poisson
/// tail beyond it is below 1e-12.
pub fn empirical_tv_poisson(
    histogram: &BTreeMap<u64, u64>,
    samples: u64,
    lambda: f64,
) -> Result<f64, PoissonError> {
    if samples == 0 {
        return Err(PoissonError::NoSamples);
    }
    if !(lambda > 0.0) {
        return Err(PoissonError::NonPositiveLambda { lambda });
    }
    let hist_max = histogram.keys().next_back().copied().unwrap_or(0);
    let cutoff = poisson_tail_cutoff(lambda, 1e-12).max(hist_max);
    let n = samples as f64;
    let mut l1 = KahanSum::new();
    let mut pois_cdf = KahanSum::new();
    // Recurrence pmf(k) = pmf(k-1) * lambda / k, restarted from log space if
    // it underflows far in the tail.
    let mut pmf = libm::exp(-lambda);
    for k in 0..=cutoff {
        if k > 0 {
            pmf *= lambda / k as f64;
            if pmf == 0.0 && k <= hist_max {
                pmf = poisson_pmf(lambda, k);
            }
        }
        let h = histogram.get(&k).map(|&c| c as f64 / n).unwrap_or(0.0);
        l1.add(fabs(h - pmf));
        pois_cdf.add(pmf);
    }
    // The histogram has no mass beyond the cutoff by construction.
    let pois_tail = (1.0 - pois_cdf.value()).max(0.0);
    Ok(0.5 * (l1.value() + pois_tail))
}

/// Smallest `K` with `P(Poisson(lambda) > K) < tail`.
fn poisson_tail_cutoff(lambda: f64, tail: f64) -> u64 {
    let mut pmf = libm::exp(-lambda);
    let mut cdf = pmf;
    let mut k = 0u64;
    // Far enough into the tail the recurrence terms shrink geometrically.
    while 1.0 - cdf >= tail && k < 10_000_000 {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
    }
    k
}

/// How the variance fed into the bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarianceSource {
    MonteCarlo,
    Analytic,
}

impl VarianceSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarianceSource::MonteCarlo => "monte-carlo",
            VarianceSource::Analytic => "analytic",
        }
    }
}

/// Inputs and outputs of one Stein–Chen diagnostic run.
#[derive(Clone, Debug)]
pub struct PoissonDiagnostics {
    pub lambda: f64,
    pub variance: f64,
    pub variance_source: VarianceSource,
    pub sum_p_squared: f64,
    pub stein_chen_bound: f64,
    pub bound_clamped: bool,
    pub empirical_tv: f64,
    pub samples: u64,
    pub generator: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeParams;

    #[test]
    fn bound_arithmetic() {
        let b = stein_chen_bound(1.0, 1.0, 0.01).unwrap();
        assert!(fabs(b.value - 0.02) < 1e-15);
        assert!(!b.clamped);
        // Independent-indicator idealization.
        let b = stein_chen_bound(2.0, 2.0, 0.0).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(!b.clamped);
        // Estimation error drives the raw bound negative: clamped.
        let b = stein_chen_bound(2.0, 1.5, 0.0).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(b.clamped);
        assert!(stein_chen_bound(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sum_pi_squared_degenerate() {
        let all = TreeParams::new(5, 1.0).unwrap();
        assert_eq!(sum_pi_squared(&all), 31.0);
        let none = TreeParams::new(5, 0.0).unwrap();
        assert_eq!(sum_pi_squared(&none), 0.0);
    }

    #[test]
    fn tv_of_exact_poisson_histogram_is_zero() {
        // Synthetic histogram equal to the pmf (scaled to integer counts).
        let lambda = 3.0;
        let samples: u64 = 1 << 40;
        let mut hist = BTreeMap::new();
        let mut assigned = 0u64;
        for k in 0..200 {
            let c = (poisson_pmf(lambda, k) * samples as f64) as u64;
            if c > 0 {
                hist.insert(k, c);
                assigned += c;
            }
        }
        // Rounding residue goes to the mode so the counts sum exactly.
        *hist.entry(3).or_insert(0) += samples - assigned;
        let tv = empirical_tv_poisson(&hist, samples, lambda).unwrap();
        assert!(tv < 1e-6, "tv = {tv}");
    }

    #[test]
    fn tv_of_point_mass_at_zero() {
        let mut hist = BTreeMap::new();
        hist.insert(0u64, 1000u64);
        let tv = empirical_tv_poisson(&hist, 1000, 1.0).unwrap();
        // TV(delta_0, Poisson(1)) = 1 - e^{-1}.
        assert!(fabs(tv - (1.0 - libm::exp(-1.0))) < 1e-9);
    }

    #[test]
    fn tv_is_a_probability() {
        let mut hist = BTreeMap::new();
        hist.insert(7u64, 10u64);
        hist.insert(2u64, 5u64);
        let tv = empirical_tv_poisson(&hist, 15, 4.0).unwrap();
        assert!((0.0..=1.0).contains(&tv));
        assert!(empirical_tv_poisson(&hist, 0, 4.0).is_err());
        assert!(empirical_tv_poisson(&hist, 15, 0.0).is_err());
    }

    #[test]
    fn large_lambda_pmf_is_stable() {
        let pmf = poisson_pmf(800.0, 800);
        // Mode of Poisson(800) is about 1/sqrt(2 pi * 800).
        assert!(pmf > 0.0 && pmf < 0.05);
        let tiny = poisson_pmf(800.0, 0);
        assert_eq!(tiny, 0.0); // underflows, but does not overflow or NaN
    }
}
