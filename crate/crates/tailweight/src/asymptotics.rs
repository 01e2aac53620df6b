//! Deterministic asymptotic quantities for the power-sum estimator: the
//! normalizing sequences, exact and numeric centering constants, the
//! studentized statistic `Z_n`, and confidence intervals built from it.
//!
//! With `t_n = (ρ+1) log(n/k_n)`, the estimator concentrates around
//! `γ (1 + t_n^{-1})` rather than `γ`; the confidence interval inverts the
//! studentized deviation around that biased center. `Z_n` is computed for
//! any `ρ > -1/2` but its normal limit is only backed by theory for
//! `ρ > 0` (together with `√k_n / log n → 0`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::QuantileModel;
use crate::quadrature;
use crate::special;
use crate::weights::WeightScheme;

pub use crate::special::upper_incomplete_gamma;

/// The deterministic ingredients of the asymptotic formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticContext {
    n: usize,
    k_n: usize,
    rho: f64,
    p: f64,
    gamma: f64,
}

impl AsymptoticContext {
    /// `gamma` is the true tail index in simulation settings and a
    /// plugged-in estimate on real data.
    pub fn new(n: usize, k_n: usize, rho: f64, p: f64, gamma: f64) -> Result<Self> {
        if k_n < 1 || k_n >= n {
            return Err(Error::Domain(format!(
                "requires 1 <= k_n < n, got k_n = {k_n}, n = {n}"
            )));
        }
        if !rho.is_finite() || rho <= -0.5 {
            return Err(Error::Domain(format!("requires rho > -1/2, got {rho}")));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("requires p > 0, got {p}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("requires gamma > 0, got {gamma}")));
        }
        Ok(Self {
            n,
            k_n,
            rho,
            p,
            gamma,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k_n(&self) -> usize {
        self.k_n
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn log_ratio(&self) -> f64 {
        (self.n as f64 / self.k_n as f64).ln()
    }
}

/// `t_n = (ρ+1) log(n/k_n)`, the scale that drives the bias term `1 + t_n^{-1}`.
pub fn t_n(ctx: &AsymptoticContext) -> f64 {
    (ctx.rho + 1.0) * ctx.log_ratio()
}

/// The normalizing rate
/// `β_n = (γ^p p √2)^{-1} ((1+2ρ)/(1+ρ))^{1/2} √k_n log(n/k_n)`.
pub fn beta_n(ctx: &AsymptoticContext) -> f64 {
    let ratio = ((1.0 + 2.0 * ctx.rho) / (1.0 + ctx.rho)).sqrt();
    ratio / (ctx.gamma.powf(ctx.p) * ctx.p * std::f64::consts::SQRT_2)
        * (ctx.k_n as f64).sqrt()
        * ctx.log_ratio()
}

/// Leading-order approximation of the normalizing sequence `σ(1/n, k_n/n)`:
/// `p γ^p (2/((1+ρ)(1+2ρ)))^{1/2} (k_n/n)^{ρ+1/2} (log(n/k_n))^{p-1} ℓ̄(k_n/n)`.
///
/// `barell_at_kn_over_n` is the slowly varying factor of the weights at
/// `k_n/n`; with the pure power scheme it is identically 1.
pub fn sigma_asymptotic(ctx: &AsymptoticContext, barell_at_kn_over_n: f64) -> Result<f64> {
    if !(barell_at_kn_over_n > 0.0) || !barell_at_kn_over_n.is_finite() {
        return Err(Error::Domain(format!(
            "requires a positive slowly varying factor, got {barell_at_kn_over_n}"
        )));
    }
    let front = ctx.p * ctx.gamma.powf(ctx.p);
    let ratio = (2.0 / ((1.0 + ctx.rho) * (1.0 + 2.0 * ctx.rho))).sqrt();
    let fraction = (ctx.k_n as f64 / ctx.n as f64).powf(ctx.rho + 0.5);
    Ok(front * ratio * fraction * ctx.log_ratio().powf(ctx.p - 1.0) * barell_at_kn_over_n)
}

/// Exact centering constant for the strict Pareto model:
/// `μ_n = (n γ^p / (ρ+1)^{p+1}) Γ(p+1, t_n)`.
///
/// Satisfies `μ_n / α_n = γ^p (1 + p t_n^{-1} + M₂(t_n))` where the remainder
/// `M₂` vanishes identically for `p = 1`.
pub fn mu_n_pareto(ctx: &AsymptoticContext) -> Result<f64> {
    let q = ctx.rho + 1.0;
    let gamma_term = special::upper_incomplete_gamma(ctx.p + 1.0, t_n(ctx))?;
    Ok(ctx.n as f64 * ctx.gamma.powf(ctx.p) / q.powf(ctx.p + 1.0) * gamma_term)
}

/// Centering constant `μ_n = n ∫_0^{k_n/n} u^ρ (log Q(1-u))^p du` by adaptive
/// quadrature, for any quantile model; with `use_bar`, the truncated variant
/// `μ̄_n = n ∫_{1/n}^{k_n/n} u^ρ (log Q(1-u))^p du + d_{n,n} (log Q(1-1/n))^p`.
///
/// The substitution `u = e^{-v}` maps the integral onto
/// `n ∫ e^{-(ρ+1)v} (log Q(1-e^{-v}))^p dv`, which is smooth and bounded even
/// for `ρ < 0` where the `u`-space integrand blows up at the origin. The
/// model's quantile must exceed 1 on the integration range so every log is
/// positive.
pub fn mu_n_numeric(model: &QuantileModel, ctx: &AsymptoticContext, use_bar: bool) -> Result<f64> {
    let q = ctx.rho + 1.0;
    let v_lo = ctx.log_ratio(); // u = k_n/n
    let v_hi = if use_bar {
        (ctx.n as f64).ln() // u = 1/n
    } else {
        // Truncation point: the exponential factor alone contributes
        // e^{-(50+12p)} relative to the integrand at v_lo, which buries the
        // polynomial growth of (log Q)^p far below the 1e-9 tolerance.
        v_lo + (50.0 + 12.0 * ctx.p) / q
    };

    let violation = std::cell::Cell::new(None);
    let integrand = |v: f64| {
        let u = (-v).exp();
        let quantile = match model.quantile(u) {
            Ok(x) => x,
            Err(_) => {
                violation.set(Some(u));
                return f64::NAN;
            }
        };
        if quantile <= 1.0 {
            violation.set(Some(u));
            return f64::NAN;
        }
        (-q * v).exp() * quantile.ln().powf(ctx.p)
    };

    let integral = quadrature::integrate(integrand, v_lo, v_hi, 1e-9, 0.0).map_err(|err| {
        if let Some(u) = violation.get() {
            Error::Domain(format!(
                "integrand undefined at u = {u}: Q(1-u) must exceed 1 on (0, k_n/n]"
            ))
        } else {
            err
        }
    })?;
    let mut mu = ctx.n as f64 * integral;

    if use_bar {
        let q_at = model.quantile(1.0 / ctx.n as f64)?;
        if q_at <= 1.0 {
            return Err(Error::Domain(format!(
                "Q(1 - 1/n) = {q_at} must exceed 1 for the truncated centering"
            )));
        }
        let d_nn = WeightScheme::new(ctx.rho)?.weight(ctx.n, ctx.n)?;
        mu += d_nn * q_at.ln().powf(ctx.p);
    }
    Ok(mu)
}

/// The studentized statistic
/// `Z_n = (γ̂ √2)^{-1} ((1+2ρ)/(1+ρ))^{1/2} √k_n log(n/k_n) (γ̂ - γ(1 + t_n^{-1}))`.
///
/// `Z_n` does not involve `p` directly; the choice of `p` only enters through
/// the value of `γ̂` itself.
pub fn z_n(gamma_hat: f64, gamma_true: f64, ctx: &AsymptoticContext) -> Result<f64> {
    if !(gamma_hat > 0.0) || !gamma_hat.is_finite() {
        return Err(Error::Domain(format!(
            "requires gamma_hat > 0, got {gamma_hat}"
        )));
    }
    if !(gamma_true > 0.0) || !gamma_true.is_finite() {
        return Err(Error::Domain(format!(
            "requires gamma_true > 0, got {gamma_true}"
        )));
    }
    let ratio = ((1.0 + 2.0 * ctx.rho) / (1.0 + ctx.rho)).sqrt();
    let center = gamma_true * (1.0 + 1.0 / t_n(ctx));
    Ok(ratio / (gamma_hat * std::f64::consts::SQRT_2)
        * (ctx.k_n as f64).sqrt()
        * ctx.log_ratio()
        * (gamma_hat - center))
}

/// A two-sided confidence interval for the tail index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Confidence interval for `γ` obtained by inverting `Z_n = ∓z*` around the
/// biased center: with `c = √2 ((1+ρ)/(1+2ρ))^{1/2} / (√k_n log(n/k_n))`,
/// the interval is `[γ̂(1 - z* c), γ̂(1 + z* c)] / (1 + t_n^{-1})`, clipped
/// below at 0 since the model has `γ > 0`.
pub fn confidence_interval(
    gamma_hat: f64,
    ctx: &AsymptoticContext,
    level: f64,
) -> Result<ConfidenceInterval> {
    if !(gamma_hat > 0.0) || !gamma_hat.is_finite() {
        return Err(Error::Domain(format!(
            "requires gamma_hat > 0, got {gamma_hat}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "requires level in (0,1), got {level}"
        )));
    }
    let z_star = special::normal_quantile(0.5 * (1.0 + level))?;
    let c = std::f64::consts::SQRT_2 * ((1.0 + ctx.rho) / (1.0 + 2.0 * ctx.rho)).sqrt()
        / ((ctx.k_n as f64).sqrt() * ctx.log_ratio());
    let bias = 1.0 + 1.0 / t_n(ctx);
    Ok(ConfidenceInterval {
        lower: (gamma_hat * (1.0 - z_star * c) / bias).max(0.0),
        upper: gamma_hat * (1.0 + z_star * c) / bias,
        level,
    })
}
