//! Order statistics and point estimators of the tail index.
//!
//! The weighted power-sum estimator is
//! `γ̂ = (S_n(p) / α_n)^{1/p}` with
//! `S_n(p) = Σ_{i=1}^{k} d_{n+1-i,n} (log X_{n+1-i,n})^p`,
//! and the classical Hill, Pickands and moment estimators are provided as
//! comparators. All estimators consume a [`SortedSample`]; sorting is done
//! once per sample and shared.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weights::WeightScheme;

/// A raw sample, in draw order. Validation happens in [`order_statistics`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Order statistics `X_{1,n} ≤ … ≤ X_{n,n}` of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Wraps a vector that is already ascending; rejects unsorted or
    /// non-finite input.
    pub fn from_ascending(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("sample is empty".into()));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "sample contains a non-finite value at position {bad}"
            )));
        }
        if let Some(w) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Validation(format!(
                "values are not ascending at position {w}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The order statistic `X_{i,n}`, 1-based.
    fn order_stat(&self, i: usize) -> f64 {
        self.values[i - 1]
    }
}

/// Sorts a sample into its order statistics. Ties are kept in input order
/// (stable sort); non-finite values are a validation error.
pub fn order_statistics(sample: &Sample) -> Result<SortedSample> {
    if sample.is_empty() {
        return Err(Error::Validation("sample is empty".into()));
    }
    if let Some(bad) = sample.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "sample contains a non-finite value at position {bad}"
        )));
    }
    let mut values = sample.values.clone();
    values.sort_by(f64::total_cmp);
    Ok(SortedSample { values })
}

/// Everything needed to evaluate the power-sum estimator on a sample:
/// the power `p > 0`, the number of upper order statistics `k_n`, and the
/// weight scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorSpec {
    p: f64,
    k_n: usize,
    #[serde(flatten)]
    scheme: WeightScheme,
}

impl EstimatorSpec {
    pub fn new(p: f64, k_n: usize, scheme: WeightScheme) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("requires p > 0, got {p}")));
        }
        if k_n < 1 {
            return Err(Error::Domain("requires k_n >= 1".into()));
        }
        Ok(Self { p, k_n, scheme })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k_n(&self) -> usize {
        self.k_n
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    fn check_against(&self, n: usize) -> Result<()> {
        if self.k_n >= n {
            return Err(Error::Domain(format!(
                "requires k_n < n, got k_n = {}, n = {n}",
                self.k_n
            )));
        }
        Ok(())
    }
}

/// The weighted power sum `S_n(p) = Σ_{i=1}^{k} d_{n+1-i,n} (log X_{n+1-i,n})^p`.
///
/// Requires `X_{n+1-k,n} > 1` so that every logarithm in the sum is positive;
/// fractional powers of negative logs are undefined and the estimator is
/// stated for samples normalized to `[1, ∞)`.
pub fn power_sum(sorted: &SortedSample, spec: &EstimatorSpec) -> Result<f64> {
    let n = sorted.len();
    spec.check_against(n)?;
    let k = spec.k_n;
    let lowest_used = sorted.order_stat(n + 1 - k);
    if lowest_used <= 1.0 {
        return Err(Error::Precondition(format!(
            "order statistic X_({},{n}) = {lowest_used} must exceed 1 \
             for the power sum with k_n = {k}",
            n + 1 - k
        )));
    }
    let weights = spec.scheme.top_weights(n, k)?;
    let mut sum = 0.0;
    for (idx, w) in weights.iter().enumerate() {
        let x = sorted.order_stat(n - idx);
        sum += w * x.ln().powf(spec.p);
    }
    Ok(sum)
}

/// The deterministic normalizer `α_n = (k_n/(ρ+1)) (k_n/n)^ρ (log(n/k_n))^p`.
pub fn alpha_n(spec: &EstimatorSpec, n: usize) -> Result<f64> {
    spec.check_against(n)?;
    let k = spec.k_n as f64;
    let rho = spec.scheme.rho();
    let ratio = k / n as f64;
    Ok(k / (rho + 1.0) * ratio.powf(rho) * (n as f64 / k).ln().powf(spec.p))
}

/// The weighted power-sum estimator `γ̂ = (S_n(p)/α_n)^{1/p}`.
pub fn gamma_wps(sorted: &SortedSample, spec: &EstimatorSpec) -> Result<f64> {
    let s = power_sum(sorted, spec)?;
    let a = alpha_n(spec, sorted.len())?;
    Ok((s / a).powf(1.0 / spec.p))
}

fn check_comparator_args(sorted: &SortedSample, k_n: usize) -> Result<f64> {
    let n = sorted.len();
    if k_n < 1 || k_n >= n {
        return Err(Error::Domain(format!(
            "requires 1 <= k_n < n, got k_n = {k_n}, n = {n}"
        )));
    }
    let denom = sorted.order_stat(n - k_n);
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "order statistic X_({},{n}) = {denom} must be positive",
            n - k_n
        )));
    }
    Ok(denom)
}

/// Hill's estimator `(1/k) Σ log(X_{n+1-i,n} / X_{n-k,n})`.
pub fn hill(sorted: &SortedSample, k_n: usize) -> Result<f64> {
    moment_stat(sorted, k_n, 1)
}

/// The statistic `M_n^{(j)} = (1/k) Σ (log(X_{n+1-i,n} / X_{n-k,n}))^j`,
/// `j ∈ {1, 2}`. `j = 1` is the Hill estimator.
pub fn moment_stat(sorted: &SortedSample, k_n: usize, j: u32) -> Result<f64> {
    if j != 1 && j != 2 {
        return Err(Error::Domain(format!("requires j in {{1, 2}}, got {j}")));
    }
    let denom = check_comparator_args(sorted, k_n)?;
    let n = sorted.len();
    let mut sum = 0.0;
    for i in 1..=k_n {
        let ratio_log = (sorted.order_stat(n + 1 - i) / denom).ln();
        sum += if j == 1 {
            ratio_log
        } else {
            ratio_log * ratio_log
        };
    }
    Ok(sum / k_n as f64)
}

/// The moment estimator of Dekkers–Einmahl–de Haan:
/// `M^{(1)} + 1 - (1/2) (1 - (M^{(1)})²/M^{(2)})^{-1}`.
pub fn moment_estimator(sorted: &SortedSample, k_n: usize) -> Result<f64> {
    let m1 = moment_stat(sorted, k_n, 1)?;
    let m2 = moment_stat(sorted, k_n, 2)?;
    if m2 <= 0.0 {
        return Err(Error::DegenerateSample(
            "second log-moment is zero; all top order statistics equal the threshold".into(),
        ));
    }
    let ratio = m1 * m1 / m2;
    if ratio == 1.0 {
        return Err(Error::DegenerateSample(
            "squared-mean to mean-square ratio of the log excesses equals one".into(),
        ));
    }
    Ok(m1 + 1.0 - 0.5 / (1.0 - ratio))
}

/// Pickands' estimator
/// `(1/log 2) log((X_{n-k+1,n} - X_{n-2k+1,n}) / (X_{n-2k+1,n} - X_{n-4k+1,n}))`.
///
/// Uses the index convention `(n-k+1, n-2k+1, n-4k+1)`; conventions differ by
/// one in parts of the literature, so the triple is spelled out here.
pub fn pickands(sorted: &SortedSample, k_n: usize) -> Result<f64> {
    let n = sorted.len();
    if k_n < 1 || 4 * k_n > n {
        return Err(Error::Domain(format!(
            "requires 1 <= 4 k_n <= n, got k_n = {k_n}, n = {n}"
        )));
    }
    let upper = sorted.order_stat(n - k_n + 1);
    let mid = sorted.order_stat(n - 2 * k_n + 1);
    let lower = sorted.order_stat(n - 4 * k_n + 1);
    let num = upper - mid;
    let den = mid - lower;
    if num <= 0.0 || den <= 0.0 {
        return Err(Error::DegenerateSample(format!(
            "zero or negative spacing in the Pickands quartet: {num}, {den}"
        )));
    }
    Ok((num / den).ln() / std::f64::consts::LN_2)
}
