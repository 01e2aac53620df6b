//! Seeded, reproducible simulation studies.
//!
//! Two study types are provided: comparison tables of estimator means and
//! mean squared errors over a `(ρ, γ, p)` grid, and distribution studies of
//! the studentized statistic `Z_n` with a chi-square normality check and
//! histogram export.
//!
//! Reproducibility: replication `r` always uses the random stream
//! `(master_seed, r)`, and aggregation runs in replication-index order, so a
//! plan produces bit-identical results at any degree of parallelism. Within
//! a replication all estimators and every `(ρ, p)` combination share one
//! sample per `γ` (common random numbers), which is why the comparator
//! columns of a table repeat identically across `ρ` blocks.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, AsymptoticContext};
use crate::error::{Error, Result};
use crate::estimators::{self, order_statistics, EstimatorSpec, Sample};
use crate::models::{validate_kn, QuantileModel};
use crate::rng::RngStream;
use crate::special;
use crate::weights::WeightScheme;

#[cfg(feature = "parallel")]
fn map_replications<T, F>(replications: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..replications).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_replications<T, F>(replications: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..replications).map(f).collect()
}

/// Which benchmark family a plan draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pareto,
    Hall,
    Frechet,
}

/// Model family specification as it appears in plan files: the tail index is
/// supplied separately (per grid point), the shape parameters here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl ModelSpec {
    pub fn pareto() -> Self {
        Self {
            model: ModelKind::Pareto,
            d1: None,
            d2: None,
            beta: None,
        }
    }

    pub fn frechet() -> Self {
        Self {
            model: ModelKind::Frechet,
            d1: None,
            d2: None,
            beta: None,
        }
    }

    pub fn hall(d1: f64, d2: f64, beta: f64) -> Self {
        Self {
            model: ModelKind::Hall,
            d1: Some(d1),
            d2: Some(d2),
            beta: Some(beta),
        }
    }

    /// Builds the concrete model for one tail index, validating all
    /// invariants of the chosen family.
    pub fn instantiate(&self, gamma: f64) -> Result<QuantileModel> {
        match self.model {
            ModelKind::Pareto | ModelKind::Frechet => {
                if self.d1.is_some() || self.d2.is_some() || self.beta.is_some() {
                    return Err(Error::Validation(
                        "d1/d2/beta apply only to the hall model".into(),
                    ));
                }
                if self.model == ModelKind::Pareto {
                    QuantileModel::pareto(gamma)
                } else {
                    QuantileModel::frechet(gamma)
                }
            }
            ModelKind::Hall => {
                let missing = |name: &str| {
                    Error::Validation(format!("hall model requires parameter `{name}`"))
                };
                let d1 = self.d1.ok_or_else(|| missing("d1"))?;
                let d2 = self.d2.ok_or_else(|| missing("d2"))?;
                let beta = self.beta.ok_or_else(|| missing("beta"))?;
                QuantileModel::hall(gamma, d1, d2, beta)
            }
        }
    }
}

/// Plan for a mean/MSE comparison table over a `(ρ, γ, p)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    #[serde(flatten)]
    pub model: ModelSpec,
    pub gammas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub ps: Vec<f64>,
    pub n: usize,
    #[serde(rename = "k")]
    pub k_n: usize,
    pub replications: u64,
    #[serde(rename = "seed")]
    pub master_seed: u64,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Validation("requires replications >= 1".into()));
        }
        validate_kn(self.n, self.k_n)?;
        if 4 * self.k_n > self.n {
            return Err(Error::Validation(format!(
                "requires 4 k_n <= n for the Pickands comparator, got k_n = {}, n = {}",
                self.k_n, self.n
            )));
        }
        if self.gammas.is_empty() || self.rhos.is_empty() || self.ps.is_empty() {
            return Err(Error::Validation(
                "gammas, rhos and ps must be non-empty".into(),
            ));
        }
        for &gamma in &self.gammas {
            self.model.instantiate(gamma)?;
        }
        for &rho in &self.rhos {
            WeightScheme::new(rho)?;
        }
        for &p in &self.ps {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::Validation(format!("requires p > 0, got {p}")));
            }
        }
        Ok(())
    }
}

/// Estimator labels used in table rows and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Wps,
    Hill,
    Pickands,
    Moment,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Wps => "wps",
            Self::Hill => "hill",
            Self::Pickands => "pickands",
            Self::Moment => "moment",
        };
        f.write_str(s)
    }
}

/// One aggregated cell of a summary table. The comparator estimators ignore
/// `ρ` and `p`, so their rows carry `None` there and appear once per `γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub estimator: EstimatorKind,
    pub rho: Option<f64>,
    pub gamma: f64,
    pub p: Option<f64>,
    pub mean: f64,
    pub mse: f64,
}

/// Aggregated output of [`run_table`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub n: usize,
    pub k_n: usize,
    pub replications: u64,
    /// Replications excluded because an estimator precondition failed,
    /// summed over all cells.
    pub excluded: u64,
    pub rows: Vec<TableRow>,
}

/// Per-replication estimates for one `γ`.
struct GammaRecord {
    wps: Vec<Option<f64>>,
    hill: Option<f64>,
    pickands: Option<f64>,
    moment: Option<f64>,
}

/// Runs the comparison study: for each replication one sample per `γ`
/// (shared across all estimators and all `(ρ, p)` combinations), aggregated
/// into means and `MSE = (1/R) Σ (estimate - γ)²` in replication order.
///
/// Replications where an estimator precondition fails (for example the
/// `k_n`-th largest observation not exceeding 1) are excluded from that
/// cell's aggregates; more than 1% exclusions in any cell fails the run.
pub fn run_table(plan: &SimulationPlan) -> Result<SummaryTable> {
    plan.validate()?;
    let models: Vec<QuantileModel> = plan
        .gammas
        .iter()
        .map(|&g| plan.model.instantiate(g))
        .collect::<Result<_>>()?;
    let mut specs = Vec::with_capacity(plan.rhos.len() * plan.ps.len());
    for &rho in &plan.rhos {
        let scheme = WeightScheme::new(rho)?;
        for &p in &plan.ps {
            specs.push(EstimatorSpec::new(p, plan.k_n, scheme)?);
        }
    }

    let n = plan.n;
    let k = plan.k_n;
    let records: Vec<Vec<GammaRecord>> = map_replications(plan.replications, |r| {
        let mut stream = RngStream::new(plan.master_seed, r);
        let uniforms: Vec<f64> = (0..n).map(|_| stream.uniform01()).collect();
        models
            .iter()
            .map(|model| {
                let values = uniforms
                    .iter()
                    .map(|&u| {
                        model
                            .quantile(u)
                            .expect("uniform01 output is strictly inside (0,1)")
                    })
                    .collect();
                match order_statistics(&Sample::new(values)) {
                    Ok(sorted) => GammaRecord {
                        wps: specs
                            .iter()
                            .map(|spec| estimators::gamma_wps(&sorted, spec).ok())
                            .collect(),
                        hill: estimators::hill(&sorted, k).ok(),
                        pickands: estimators::pickands(&sorted, k).ok(),
                        moment: estimators::moment_estimator(&sorted, k).ok(),
                    },
                    Err(_) => GammaRecord {
                        wps: vec![None; specs.len()],
                        hill: None,
                        pickands: None,
                        moment: None,
                    },
                }
            })
            .collect()
    });

    let replications = plan.replications;
    let mut excluded_total = 0u64;
    let mut aggregate =
        |estimates: &mut dyn Iterator<Item = Option<f64>>, gamma: f64| -> Result<(f64, f64)> {
            let mut count = 0u64;
            let mut sum = 0.0;
            let mut sse = 0.0;
            for v in estimates.flatten() {
                count += 1;
                sum += v;
                sse += (v - gamma) * (v - gamma);
            }
            let excluded = replications - count;
            excluded_total += excluded;
            if excluded * 100 > replications {
                return Err(Error::Numerical(format!(
                    "{excluded} of {replications} replications excluded (> 1%) \
                 for gamma = {gamma}"
                )));
            }
            Ok((sum / count as f64, sse / count as f64))
        };

    let mut rows = Vec::new();
    for (ri, &rho) in plan.rhos.iter().enumerate() {
        for (gi, &gamma) in plan.gammas.iter().enumerate() {
            for (pi, &p) in plan.ps.iter().enumerate() {
                let si = ri * plan.ps.len() + pi;
                let (mean, mse) = aggregate(&mut records.iter().map(|rec| rec[gi].wps[si]), gamma)?;
                rows.push(TableRow {
                    estimator: EstimatorKind::Wps,
                    rho: Some(rho),
                    gamma,
                    p: Some(p),
                    mean,
                    mse,
                });
            }
        }
    }
    for (kind, pick) in [
        (
            EstimatorKind::Hill,
            (|rec: &GammaRecord| rec.hill) as fn(&GammaRecord) -> Option<f64>,
        ),
        (EstimatorKind::Pickands, |rec: &GammaRecord| rec.pickands),
        (EstimatorKind::Moment, |rec: &GammaRecord| rec.moment),
    ] {
        for (gi, &gamma) in plan.gammas.iter().enumerate() {
            let (mean, mse) = aggregate(&mut records.iter().map(|rec| pick(&rec[gi])), gamma)?;
            rows.push(TableRow {
                estimator: kind,
                rho: None,
                gamma,
                p: None,
                mean,
                mse,
            });
        }
    }

    Ok(SummaryTable {
        n,
        k_n: k,
        replications,
        excluded: excluded_total,
        rows,
    })
}

fn default_chi2_bins() -> usize {
    20
}

fn default_hist_bins() -> usize {
    30
}

/// Plan for a distribution study of `Z_n` at a single `(γ, ρ, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZnStudyPlan {
    #[serde(flatten)]
    pub model: ModelSpec,
    pub gamma: f64,
    pub rho: f64,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "k")]
    pub k_n: usize,
    pub replications: u64,
    #[serde(rename = "seed")]
    pub master_seed: u64,
    /// Equiprobable cells for the chi-square normality test.
    #[serde(default = "default_chi2_bins")]
    pub chi2_bins: usize,
    /// Equal-width bins for the exported histogram.
    #[serde(default = "default_hist_bins")]
    pub hist_bins: usize,
}

impl ZnStudyPlan {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Validation("requires replications >= 1".into()));
        }
        validate_kn(self.n, self.k_n)?;
        if !(self.rho > 0.0) {
            return Err(Error::Validation(format!(
                "the Z_n limit theory requires rho > 0, got {}",
                self.rho
            )));
        }
        self.model.instantiate(self.gamma)?;
        AsymptoticContext::new(self.n, self.k_n, self.rho, self.p, self.gamma)?;
        Ok(())
    }
}

/// Equal-width histogram with the fitted-normal density at bin midpoints,
/// ready for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `len() == counts.len() + 1`; the right-most bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Density of the normal law fitted to the data, at each bin midpoint.
    pub fitted_density: Vec<f64>,
}

/// Output of [`run_zn_study`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZnStudyReport {
    pub zn_values: Vec<f64>,
    pub zn_mean: f64,
    pub zn_sd: f64,
    pub gamma_hat_mean: f64,
    pub chi2_pvalue: f64,
    pub histogram: Histogram,
    pub excluded: u64,
}

/// Simulates `Z_n` under the plan's model: each replication draws one sample
/// with stream `(master_seed, r)`, computes `γ̂` and studentizes it around
/// the biased center `γ (1 + t_n^{-1})`.
pub fn run_zn_study(plan: &ZnStudyPlan) -> Result<ZnStudyReport> {
    plan.validate()?;
    let model = plan.model.instantiate(plan.gamma)?;
    let scheme = WeightScheme::new(plan.rho)?;
    let spec = EstimatorSpec::new(plan.p, plan.k_n, scheme)?;
    let ctx = AsymptoticContext::new(plan.n, plan.k_n, plan.rho, plan.p, plan.gamma)?;

    let estimates: Vec<Option<f64>> = map_replications(plan.replications, |r| {
        let mut stream = RngStream::new(plan.master_seed, r);
        let sample = crate::rng::sample_model(&model, plan.n, &mut stream);
        let sorted = order_statistics(&sample).ok()?;
        estimators::gamma_wps(&sorted, &spec).ok()
    });

    let mut gamma_hats = Vec::with_capacity(estimates.len());
    let mut zn_values = Vec::with_capacity(estimates.len());
    for gamma_hat in estimates.iter().flatten() {
        gamma_hats.push(*gamma_hat);
        zn_values.push(asymptotics::z_n(*gamma_hat, plan.gamma, &ctx)?);
    }
    let excluded = plan.replications - gamma_hats.len() as u64;
    if excluded * 100 > plan.replications {
        return Err(Error::Numerical(format!(
            "{excluded} of {} replications excluded (> 1%)",
            plan.replications
        )));
    }

    let zn_mean = mean(&zn_values);
    let zn_sd = sample_sd(&zn_values, zn_mean);
    let gamma_hat_mean = mean(&gamma_hats);
    let chi2_pvalue = chi_square_normality(&zn_values, plan.chi2_bins)?;
    let histogram = histogram(&zn_values, plan.hist_bins)?;

    Ok(ZnStudyReport {
        zn_values,
        zn_mean,
        zn_sd,
        gamma_hat_mean,
        chi2_pvalue,
        histogram,
        excluded,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the `n - 1` denominator.
fn sample_sd(values: &[f64], mean: f64) -> f64 {
    let sse: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (sse / (values.len() as f64 - 1.0)).sqrt()
}

/// Pearson chi-square test of normality with location and scale fitted from
/// the data.
///
/// The real line is split into `bin_count` cells that are equiprobable under
/// the fitted normal; adjacent cells are merged until every expected count
/// is at least 5; the p-value uses `cells - 3` degrees of freedom to account
/// for the two estimated parameters.
pub fn chi_square_normality(values: &[f64], bin_count: usize) -> Result<f64> {
    if values.len() < 50 {
        return Err(Error::InsufficientData(format!(
            "chi-square normality test requires at least 50 values, got {}",
            values.len()
        )));
    }
    if bin_count < 4 {
        return Err(Error::Domain(format!(
            "requires at least 4 cells, got bin_count = {bin_count}"
        )));
    }
    let n = values.len() as f64;
    let m = mean(values);
    let sd = sample_sd(values, m);
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample(
            "zero variance; the normality test is undefined".into(),
        ));
    }

    // Equiprobable cell edges under the fitted normal.
    let mut edges = Vec::with_capacity(bin_count - 1);
    for j in 1..bin_count {
        let q = special::normal_quantile(j as f64 / bin_count as f64)?;
        edges.push(m + sd * q);
    }
    let mut observed = vec![0u64; bin_count];
    for &v in values {
        let cell = edges.partition_point(|&e| e <= v);
        observed[cell] += 1;
    }

    // Merge adjacent cells left to right until every expected count >= 5.
    let expected_each = n / bin_count as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for &obs in &observed {
        acc_obs += obs as f64;
        acc_exp += expected_each;
        if acc_exp >= 5.0 {
            cells.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 {
        if let Some(last) = cells.last_mut() {
            last.0 += acc_obs;
            last.1 += acc_exp;
        }
    }
    if cells.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} cells have expected count >= 5; need at least 4",
            cells.len()
        )));
    }

    let stat: f64 = cells
        .iter()
        .map(|&(obs, exp)| (obs - exp) * (obs - exp) / exp)
        .sum();
    let df = (cells.len() - 3) as f64;
    special::chi_square_survival(stat, df)
}

/// Equal-width histogram over `[min, max]` with the right-most bin closed.
/// A constant sample collapses to a single zero-width bin holding everything.
pub fn histogram(values: &[f64], bin_count: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "histogram of an empty sample".into(),
        ));
    }
    if bin_count < 1 {
        return Err(Error::Domain("requires bin_count >= 1".into()));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let m = mean(values);
    let sd = if values.len() > 1 {
        sample_sd(values, m)
    } else {
        0.0
    };
    let density = |x: f64| {
        if sd > 0.0 {
            special::normal_pdf((x - m) / sd) / sd
        } else {
            0.0
        }
    };

    if min == max {
        return Ok(Histogram {
            edges: vec![min, max],
            counts: vec![values.len() as u64],
            fitted_density: vec![density(min)],
        });
    }

    let width = (max - min) / bin_count as f64;
    let mut edges: Vec<f64> = (0..=bin_count).map(|j| min + j as f64 * width).collect();
    edges[bin_count] = max;
    let mut counts = vec![0u64; bin_count];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(bin_count - 1);
        counts[idx] += 1;
    }
    let fitted_density = (0..bin_count)
        .map(|j| density(0.5 * (edges[j] + edges[j + 1])))
        .collect();
    Ok(Histogram {
        edges,
        counts,
        fitted_density,
    })
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}
