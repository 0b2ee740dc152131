//! Sampling-based partition-function estimation.
//!
//! The estimator writes `Z` as a telescoping product over a clique cover
//! `K_1..K_m`: with `V_i = V` minus the first `i-1` cliques,
//!
//! `Z(G[V_i]) / Z(G[V_(i+1)]) = 1 / Pr[I cap K_i = empty]`
//!
//! under the Gibbs distribution of `G[V_i]`, so `Z` is the product of the
//! reciprocals of those escape probabilities. Each probability is estimated
//! by running clique dynamics on `G[V_i]` (restricted cover, empty start)
//! and averaging the indicator over independent replicate chains.

mod grid;
mod telescope;

pub use grid::estimate_hard_sphere;
pub use telescope::{estimate_partition_function, ratio_estimate, telescope_support_sets};

use crate::error::{Error, Result};
use crate::hs::{DiscretizationReport, RegimeFlags};
use serde::Serialize;
use std::time::Duration;

/// Tuning knobs for the estimator. The three constants scale the derived
/// budget; overrides replace the derived counts outright.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    /// Target relative accuracy of the estimate.
    pub epsilon: f64,
    /// Master seed; replicate chains derive their streams from it.
    pub seed: u64,
    /// Samples per ratio = ceil(samples_constant * m * z_max / epsilon^2).
    pub samples_constant: f64,
    /// Per-sample accuracy = epsilon / (tv_constant * m * z_max).
    pub tv_constant: f64,
    /// Steps per sample = ceil(steps_constant * m * ln(m z_max / tv)).
    pub steps_constant: f64,
    /// Replaces the derived samples-per-ratio count when set.
    pub samples_override: Option<u64>,
    /// Replaces the derived steps-per-sample count when set.
    pub steps_override: Option<u64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            seed: 0,
            samples_constant: 48.0,
            tv_constant: 8.0,
            steps_constant: 64.0,
            samples_override: None,
            steps_override: None,
        }
    }
}

impl EstimatorConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            ..Self::default()
        }
    }

    /// Derives the budget for `m` cliques with worst per-clique partition
    /// function `z_max`.
    pub fn budget(&self, m: usize, z_max: f64) -> Result<SampleBudget> {
        sample_budget_with(self, m, z_max)
    }
}

/// How much sampling a run will do, per telescoping ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampleBudget {
    pub samples_per_ratio: u64,
    /// Accuracy each individual sample's chain is run to.
    pub per_sample_tv: f64,
    pub steps_per_sample: u64,
}

/// Budget with the default constants: samples = ceil(48 m z / eps^2),
/// per-sample accuracy eps / (8 m z), steps = ceil(64 m ln(m z / accuracy)).
pub fn sample_budget(m: usize, z_max: f64, epsilon: f64) -> Result<SampleBudget> {
    sample_budget_with(
        &EstimatorConfig {
            epsilon,
            ..EstimatorConfig::default()
        },
        m,
        z_max,
    )
}

fn sample_budget_with(config: &EstimatorConfig, m: usize, z_max: f64) -> Result<SampleBudget> {
    if m == 0 {
        return Err(Error::Validation("cover has no parts".into()));
    }
    if !(z_max.is_finite() && z_max >= 1.0) {
        return Err(Error::Validation(format!(
            "per-clique partition function must be at least 1, got {z_max}"
        )));
    }
    let eps = config.epsilon;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Validation(format!(
            "epsilon must be positive, got {eps}"
        )));
    }
    let mf = m as f64;
    let samples_f = (config.samples_constant * mf * z_max / (eps * eps)).ceil();
    let per_sample_tv = eps / (config.tv_constant * mf * z_max);
    let steps_f = (config.steps_constant * mf * (mf * z_max / per_sample_tv).ln()).ceil();
    if !(samples_f.is_finite() && samples_f < 2f64.powi(32))
        || !(steps_f.is_finite() && steps_f < 2f64.powi(40))
    {
        return Err(Error::Overflow("sample budget"));
    }
    let samples_per_ratio = config.samples_override.unwrap_or(samples_f as u64).max(1);
    if samples_per_ratio >= 1 << 32 {
        return Err(Error::Overflow("sample budget"));
    }
    let steps_per_sample = config.steps_override.unwrap_or(steps_f as u64).max(1);
    Ok(SampleBudget {
        samples_per_ratio,
        per_sample_tv,
        steps_per_sample,
    })
}

/// Everything a partition-function estimate reports.
///
/// Serialization deliberately omits the wall time so identical inputs give
/// byte-identical JSON; runtimes belong on stderr.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    /// The estimated partition function, `exp(log_estimate)`.
    pub estimate: f64,
    /// Sum of `-ln(ratio_i)`; finite even when `estimate` overflows.
    pub log_estimate: f64,
    /// Estimated escape probability per telescoping stage, each in (0, 1].
    pub ratios: Vec<f64>,
    /// Replicates actually run per stage (0 for stages that were exact).
    pub sample_counts: Vec<u64>,
    /// Number of cliques in the cover.
    pub m: usize,
    /// Largest per-clique partition function.
    pub z_max: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub budget: SampleBudget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discretization: Option<DiscretizationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime_flags: Option<RegimeFlags>,
    #[serde(skip)]
    pub wall_time: Duration,
}
