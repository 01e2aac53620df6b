//! Tail index estimation from weighted power sums of extreme order statistics.
//!
//! The estimator at the center of this crate is built from the statistic
//! `S_n(p) = Σ_{i=1}^{k} d_{n+1-i,n} (log X_{n+1-i,n})^p` taken over the top
//! `k` order statistics of a heavy-tailed sample, with weights generated by a
//! regularly varying density `(1-t)^ρ`. Normalizing `S_n(p)` by a deterministic
//! sequence `α_n` yields `γ̂ = (S_n(p)/α_n)^{1/p}`, an estimator of the tail
//! index `γ` that admits explicit asymptotic normality and confidence
//! intervals.
//!
//! The crate is organized around that pipeline:
//!
//! - [`models`] — quantile functions of benchmark heavy-tail laws (strict
//!   Pareto, Hall's second-order family, Fréchet) plus sanity diagnostics;
//! - [`rng`] — seedable, stream-splittable random generation and
//!   inverse-transform sampling;
//! - [`weights`] — the weight family `d_{i,n}` in closed form;
//! - [`estimators`] — order statistics, `S_n(p)`, `γ̂`, and the Hill,
//!   Pickands and moment comparators;
//! - [`asymptotics`] — centering/normalizing sequences, the studentized
//!   statistic `Z_n`, and confidence intervals;
//! - [`montecarlo`] — reproducible simulation studies (summary tables and
//!   `Z_n` distribution studies with a chi-square normality check).
//!
//! Simulation replications run in parallel through rayon when the default
//! `parallel` feature is enabled; disabling it yields a dependency-light
//! sequential build with bit-identical results.

// Validation uses `!(x > 0.0)`-style comparisons on purpose: they are true
// for NaN, so non-numbers fail the same check as out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod estimators;
pub mod models;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
