//! The strict neighborhood-contraction condition and its consequence for
//! influence sums.
//!
//! The condition asks for a positive vertex function `mu` and a margin
//! `alpha` with, at every vertex `v`,
//! `sum_{w ~ v} (lambda_w / (1 + lambda_w)) mu(w) <= (1 - alpha) mu(v)`.
//! When it holds, the weighted influence-sum inequality holds with weights
//! `mu` and constant `1/alpha` on every induced subgraph; this module checks
//! both facts numerically.

use super::influence::{check_influence_condition, ConditionCheck, SubsetPolicy};
use crate::error::{Error, Result};
use crate::hardcore::HardCoreInstance;
use serde::Serialize;

/// Slack allowed in the per-vertex contraction inequality.
const CDC_TOL: f64 = 1e-12;

/// Witness that the contraction inequality held at every vertex.
#[derive(Debug, Clone, Serialize)]
pub struct CdcCertificate {
    pub mu: Vec<f64>,
    pub alpha: f64,
    /// Smallest observed `(1 - alpha) mu(v) - sum`.
    pub worst_slack: f64,
}

/// First vertex where the contraction inequality failed.
#[derive(Debug, Clone, Serialize)]
pub struct CdcCounterexample {
    pub vertex: u32,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum CdcCheck {
    Certificate(CdcCertificate),
    Counterexample(CdcCounterexample),
}

impl CdcCheck {
    pub fn passed(&self) -> bool {
        matches!(self, CdcCheck::Certificate(_))
    }
}

fn validate_mu_alpha(inst: &HardCoreInstance, mu: &[f64], alpha: f64) -> Result<()> {
    if mu.len() != inst.vertex_count() {
        return Err(Error::Validation(format!(
            "{} values supplied for {} vertices",
            mu.len(),
            inst.vertex_count()
        )));
    }
    if let Some(bad) = mu.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Validation(format!(
            "mu at vertex {bad} must be positive and finite, got {}",
            mu[bad]
        )));
    }
    if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
        return Err(Error::Validation(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    Ok(())
}

/// Verifies the per-vertex contraction inequality exactly.
pub fn check_strict_cdc(inst: &HardCoreInstance, mu: &[f64], alpha: f64) -> Result<CdcCheck> {
    validate_mu_alpha(inst, mu, alpha)?;
    let mut worst_slack = f64::INFINITY;
    for v in 0..inst.vertex_count() as u32 {
        let lhs: f64 = inst
            .graph()
            .neighbors(v)
            .iter()
            .map(|&w| {
                let lam = inst.weight(w);
                lam / (1.0 + lam) * mu[w as usize]
            })
            .sum();
        let rhs = (1.0 - alpha) * mu[v as usize];
        if lhs > rhs + CDC_TOL {
            return Ok(CdcCheck::Counterexample(CdcCounterexample {
                vertex: v,
                lhs,
                rhs,
            }));
        }
        worst_slack = worst_slack.min(rhs - lhs);
    }
    Ok(CdcCheck::Certificate(CdcCertificate {
        mu: mu.to_vec(),
        alpha,
        worst_slack,
    }))
}

/// Result of checking that contraction with margin `alpha` yields the
/// influence-sum inequality with weights `mu` and constant `1/alpha`.
#[derive(Debug, Clone, Serialize)]
pub struct CdcImplicationReport {
    pub alpha: f64,
    /// The implied constant `1/alpha`.
    pub c: f64,
    pub cdc_worst_slack: f64,
    pub condition: ConditionCheck,
    pub ok: bool,
}

/// Checks the implication end to end: the contraction inequality must hold
/// (precondition), and then the influence-sum inequality with `q = mu`,
/// `C = 1/alpha` is verified over every induced subgraph (exhaustive,
/// capped at 10 vertices).
pub fn cdc_implies_influence_bound_check(
    inst: &HardCoreInstance,
    mu: &[f64],
    alpha: f64,
) -> Result<CdcImplicationReport> {
    if inst.vertex_count() > 10 {
        return Err(Error::CapExceeded {
            what: "exhaustive contraction-implication check",
            got: inst.vertex_count() as u128,
            limit: 10,
        });
    }
    let cdc = match check_strict_cdc(inst, mu, alpha)? {
        CdcCheck::Certificate(cert) => cert,
        CdcCheck::Counterexample(cx) => {
            return Err(Error::Validation(format!(
                "contraction precondition fails at vertex {}: {} > {}",
                cx.vertex, cx.lhs, cx.rhs
            )));
        }
    };
    let c = 1.0 / alpha;
    let condition = check_influence_condition(inst, mu, c, SubsetPolicy::Exhaustive)?;
    let ok = condition.passed();
    Ok(CdcImplicationReport {
        alpha,
        c,
        cdc_worst_slack: cdc.worst_slack,
        condition,
        ok,
    })
}
