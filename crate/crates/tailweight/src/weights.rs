//! The weight family `d_{i,n}` attached to the power sums.
//!
//! Weights are cell averages of a density that is regularly varying at the
//! upper endpoint: `d_{i,n} = n ∫_{(i-1)/n}^{i/n} (1-t)^ρ dt` with `ρ > -1/2`.
//! Only the pure power case is implemented; [`WeightScheme`] is the extension
//! point should a slowly varying factor ever be needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight family parametrized by the regular-variation index `ρ > -1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    rho: f64,
}

impl WeightScheme {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= -0.5 {
            return Err(Error::Domain(format!(
                "weight scheme requires rho > -1/2, got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The weight `d_{i,n}`, in closed form:
    /// `(n/(ρ+1)) [(1-(i-1)/n)^{ρ+1} - (1-i/n)^{ρ+1}]`.
    ///
    /// The difference of powers is evaluated through `expm1`/`ln_1p` so the
    /// relative error stays near machine precision even when the two bases
    /// are adjacent (large `n`, small `n - i`).
    pub fn weight(&self, i: usize, n: usize) -> Result<f64> {
        if i < 1 || i > n {
            return Err(Error::Domain(format!(
                "weight index i = {i} out of range 1..={n}"
            )));
        }
        let q = self.rho + 1.0;
        let nf = n as f64;
        let m = (n - i) as f64; // lower base is m/n, upper base (m+1)/n
        let diff = if n == i {
            (1.0 / nf).powf(q)
        } else {
            (m / nf).powf(q) * (q * (1.0 / m).ln_1p()).exp_m1()
        };
        Ok(nf / q * diff)
    }

    /// Weights attached to the top `k_n` order statistics: entry `i`
    /// (1-based) is `d_{n+1-i,n}`, so the returned sequence pairs directly
    /// with `X_{n,n}, X_{n-1,n}, …` in the power sum.
    pub fn top_weights(&self, n: usize, k_n: usize) -> Result<Vec<f64>> {
        if k_n < 1 || k_n >= n {
            return Err(Error::Domain(format!(
                "top_weights requires 1 <= k_n < n, got k_n = {k_n}, n = {n}"
            )));
        }
        (1..=k_n).map(|i| self.weight(n + 1 - i, n)).collect()
    }
}
