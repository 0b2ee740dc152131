//! Pairwise influence matrices and the weighted influence-sum condition.

use crate::error::{Error, Result};
use crate::hardcore::{
    enumerate_independent_sets, induced_subinstance, HardCoreInstance, PartialConfig,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Slack allowed when checking the weighted influence-sum inequality.
pub const CONDITION_TOL: f64 = 1e-9;

/// The matrix of pairwise influences under a conditioning: entry `(v, w)`
/// is `mu(1_w | 1_v, cond) - mu(1_w | 0_v, cond)`, zero on the diagonal.
///
/// A row is undefined when one of its two conditionings has probability
/// zero (the vertex is fully determined); undefined rows are tracked
/// explicitly rather than silently zeroed.
#[derive(Debug, Clone)]
pub struct InfluenceMatrix {
    psi: DMatrix<f64>,
    defined: Vec<bool>,
}

impl InfluenceMatrix {
    pub fn dim(&self) -> usize {
        self.defined.len()
    }

    pub fn row_defined(&self, v: u32) -> bool {
        self.defined[v as usize]
    }

    /// The influence of `v` on `w`; `None` when row `v` is undefined.
    pub fn entry(&self, v: u32, w: u32) -> Option<f64> {
        self.defined[v as usize].then(|| self.psi[(v as usize, w as usize)])
    }

    /// The raw matrix; undefined rows are zero. Prefer [`Self::entry`] or
    /// [`Self::fully_defined`] when undefined rows must not be conflated
    /// with zero influence.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.psi
    }

    /// The matrix, provided every row is defined.
    pub fn fully_defined(&self) -> Result<&DMatrix<f64>> {
        match self.defined.iter().position(|&d| !d) {
            None => Ok(&self.psi),
            Some(v) => Err(Error::Validation(format!(
                "vertex {v} is fully determined by the conditioning; its influence row is undefined"
            ))),
        }
    }
}

/// Computes the influence matrix exactly by enumeration.
///
/// One pass over the consistent independent sets accumulates, per vertex,
/// the mass of sets containing it and, per pair, the mass of sets
/// containing both; the conditional marginals follow by division.
pub fn pairwise_influence(inst: &HardCoreInstance, cond: &PartialConfig) -> Result<InfluenceMatrix> {
    cond.validate(inst.graph())?;
    let n = inst.vertex_count();
    let mut total = 0.0;
    let mut single = vec![0.0; n];
    let mut pair = DMatrix::<f64>::zeros(n, n);
    for set in enumerate_independent_sets(inst.graph())? {
        if !cond.consistent_with(&set) {
            continue;
        }
        let w = set.weight_in(inst);
        total += w;
        let vs = set.vertices();
        for (i, &v) in vs.iter().enumerate() {
            single[v as usize] += w;
            for &u in &vs[i + 1..] {
                pair[(v as usize, u as usize)] += w;
                pair[(u as usize, v as usize)] += w;
            }
        }
    }
    if total <= 0.0 {
        return Err(Error::Validation(
            "conditioning event has zero probability".into(),
        ));
    }
    let mut psi = DMatrix::zeros(n, n);
    let mut defined = vec![true; n];
    for v in 0..n {
        let with_v = single[v];
        let without_v = total - with_v;
        if with_v <= 0.0 || without_v <= 0.0 {
            defined[v] = false;
            continue;
        }
        for w in 0..n {
            if w == v {
                continue;
            }
            let both = pair[(v, w)];
            psi[(v, w)] = both / with_v - (single[w] - both) / without_v;
        }
    }
    Ok(InfluenceMatrix { psi, defined })
}

/// Which induced subgraphs the condition check visits.
#[derive(Debug, Clone, Copy)]
pub enum SubsetPolicy {
    /// Every nonempty subset; limited to 12 vertices.
    Exhaustive,
    /// `count` subsets drawn uniformly (with replacement) from a seeded
    /// generator.
    Sampled { count: u64, seed: u64 },
}

/// Witness that the weighted influence-sum inequality held everywhere it
/// was checked: for each visited subset `S` and root `r` in `S`,
/// `sum_v |psi_{G[S]}(r, v)| q(v) <= C q(r)` up to [`CONDITION_TOL`].
#[derive(Debug, Clone, Serialize)]
pub struct InfluenceBoundCertificate {
    pub q: Vec<f64>,
    pub c: f64,
    pub checked_subsets: String,
    /// Largest observed `sum / q(r)`: the smallest constant that would
    /// have passed.
    pub worst_ratio: f64,
    /// Smallest observed `C q(r) - sum` (can be slightly negative within
    /// tolerance).
    pub worst_slack: f64,
}

/// First subset and root where the inequality failed.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCounterexample {
    pub subset: Vec<u32>,
    pub root: u32,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub enum ConditionCheck {
    Certificate(InfluenceBoundCertificate),
    Counterexample(ConditionCounterexample),
}

impl ConditionCheck {
    pub fn passed(&self) -> bool {
        matches!(self, ConditionCheck::Certificate(_))
    }
}

/// Checks the weighted influence-sum inequality with weights `q` and
/// constant `c` over induced subgraphs chosen by `policy`. Vertex ids in
/// the result refer to the original instance.
pub fn check_influence_condition(
    inst: &HardCoreInstance,
    q: &[f64],
    c: f64,
    policy: SubsetPolicy,
) -> Result<ConditionCheck> {
    let n = inst.vertex_count();
    if q.len() != n {
        return Err(Error::Validation(format!(
            "{} weights supplied for {n} vertices",
            q.len()
        )));
    }
    if let Some(bad) = q.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Validation(format!(
            "weight of vertex {bad} must be positive and finite, got {}",
            q[bad]
        )));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::Validation(format!(
            "constant must be finite and nonnegative, got {c}"
        )));
    }

    let mut worst_ratio = 0.0f64;
    let mut worst_slack = f64::INFINITY;
    let mut check_subset = |subset: &[u32]| -> Result<Option<ConditionCounterexample>> {
        let (sub, table) = induced_subinstance(inst, subset)?;
        let psi = pairwise_influence(&sub, &PartialConfig::empty())?;
        let matrix = psi.fully_defined()?;
        for (r, &orig_r) in table.iter().enumerate() {
            let lhs: f64 = table
                .iter()
                .enumerate()
                .map(|(v, &orig_v)| matrix[(r, v)].abs() * q[orig_v as usize])
                .sum();
            let rhs = c * q[orig_r as usize];
            worst_ratio = worst_ratio.max(lhs / q[orig_r as usize]);
            worst_slack = worst_slack.min(rhs - lhs);
            if lhs > rhs + CONDITION_TOL {
                return Ok(Some(ConditionCounterexample {
                    subset: table.clone(),
                    root: orig_r,
                    lhs,
                    rhs,
                }));
            }
        }
        Ok(None)
    };

    let description;
    match policy {
        SubsetPolicy::Exhaustive => {
            if n > 12 {
                return Err(Error::CapExceeded {
                    what: "exhaustive subset enumeration",
                    got: n as u128,
                    limit: 12,
                });
            }
            for mask in 1u32..(1 << n) {
                let subset: Vec<u32> = (0..n as u32).filter(|v| mask >> v & 1 == 1).collect();
                if let Some(cx) = check_subset(&subset)? {
                    return Ok(ConditionCheck::Counterexample(cx));
                }
            }
            description = format!("all {} nonempty subsets", (1u64 << n) - 1);
        }
        SubsetPolicy::Sampled { count, seed } => {
            if n > 24 {
                return Err(Error::CapExceeded {
                    what: "sampled subset check",
                    got: n as u128,
                    limit: 24,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut drawn = 0;
            while drawn < count {
                let mask = rng.random::<u64>() & ((1u64 << n) - 1);
                if mask == 0 {
                    continue;
                }
                drawn += 1;
                let subset: Vec<u32> = (0..n as u32).filter(|v| mask >> v & 1 == 1).collect();
                if let Some(cx) = check_subset(&subset)? {
                    return Ok(ConditionCheck::Counterexample(cx));
                }
            }
            description = format!("{count} sampled subsets (seed {seed})");
        }
    }
    Ok(ConditionCheck::Certificate(InfluenceBoundCertificate {
        q: q.to_vec(),
        c,
        checked_subsets: description,
        worst_ratio,
        worst_slack,
    }))
}
