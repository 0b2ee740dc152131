//! Built-in verification batteries.
//!
//! Each suite bundles exact numeric checks of the laws the library relies
//! on, aggregated per law: one result line per named check with the worst
//! observed slack or discrepancy across the whole battery. The batteries
//! mix fixed instances (so regressions surface deterministically) with
//! seeded random ones (so the sweep is not tied to hand-picked cases).

use hsm_core::dynamics::{
    spectral_gap, stationary_distribution, transition_matrix_exact, DynamicsKind,
};
use hsm_core::error::{Error, Result};
use hsm_core::hardcore::{
    induced_subinstance, marginals, singleton_cover, BlockCover, CliqueCover, Graph,
    HardCoreInstance, PartialConfig,
};
use hsm_core::spectral::{
    cdc_implies_influence_bound_check, check_influence_condition, complex_representation,
    pairwise_influence, skeleton_walk_matrix, spectral_radius_bound_check, two_step_walk_matrix,
    verify_clique_block_comparison, verify_saw_influence, verify_spectral_bounds,
    verify_tree_multiplicativity, ConditionCheck, InfluenceBoundCertificate, SubsetPolicy,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Largest extra instance accepted: every battery enumerates states or
/// subsets exhaustively, so the cost is exponential in the vertex count.
const EXTRA_INSTANCE_CAP: usize = 10;

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    /// Worst value observed across the battery. For discrepancy checks
    /// this is the largest deviation (small is good); for bound checks it
    /// is the smallest slack (positive is good).
    pub worst: f64,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub ok: bool,
}

pub fn render_text(report: &VerifyReport) -> String {
    let mut out = format!("suite: {}  seed: {}\n", report.suite, report.seed);
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0);
    for c in &report.checks {
        let status = if c.ok { "ok  " } else { "FAIL" };
        out.push_str(&format!(
            "{status} {:width$}  worst {:>12.5e}  {}\n",
            c.name, c.worst, c.detail
        ));
    }
    let verdict = if report.ok { "passed" } else { "FAILED" };
    out.push_str(&format!(
        "result: {verdict} ({} checks)\n",
        report.checks.len()
    ));
    out
}

pub fn run_suite(
    suite: &str,
    seed: u64,
    extra: Option<&HardCoreInstance>,
) -> Result<VerifyReport> {
    if let Some(inst) = extra {
        if inst.vertex_count() > EXTRA_INSTANCE_CAP {
            return Err(Error::Validation(format!(
                "verification enumerates exhaustively; extra instances are capped \
                 at {EXTRA_INSTANCE_CAP} vertices, got {}",
                inst.vertex_count()
            )));
        }
    }
    match suite {
        "stationarity" | "influence" | "saw" | "complex" | "bounds" | "all" => {}
        other => {
            return Err(Error::Validation(format!(
                "unknown suite {other:?}; expected one of stationarity, influence, \
                 saw, complex, bounds, all"
            )))
        }
    }
    let all = suite == "all";
    let mut checks = Vec::new();
    if all || suite == "stationarity" {
        stationarity_battery(seed, extra, &mut checks)?;
    }
    if all || suite == "influence" {
        influence_battery(seed, &mut checks)?;
    }
    if all || suite == "saw" {
        saw_battery(seed, &mut checks)?;
    }
    if all || suite == "complex" {
        complex_battery(seed, &mut checks)?;
    }
    if all || suite == "bounds" {
        bounds_battery(extra, &mut checks)?;
    }
    let ok = checks.iter().all(|c| c.ok);
    Ok(VerifyReport {
        suite: suite.to_string(),
        seed,
        checks,
        ok,
    })
}

fn random_instance(n: usize, edge_p: f64, rng: &mut ChaCha8Rng) -> Result<HardCoreInstance> {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.random::<f64>() < edge_p {
                edges.push((u, v));
            }
        }
    }
    let weights: Vec<f64> = (0..n).map(|_| 0.2 + 1.6 * rng.random::<f64>()).collect();
    HardCoreInstance::new(Graph::new(n, &edges)?, weights)
}

/// Greedy partition of the vertices into cliques: each vertex joins the
/// first part it is fully adjacent to, else starts a new one.
fn greedy_clique_cover(g: &Graph) -> Result<CliqueCover> {
    let mut parts: Vec<Vec<u32>> = Vec::new();
    for v in 0..g.vertex_count() as u32 {
        match parts
            .iter_mut()
            .find(|part| part.iter().all(|&u| g.is_edge(u, v)))
        {
            Some(part) => part.push(v),
            None => parts.push(vec![v]),
        }
    }
    CliqueCover::new(parts)
}

/// A partition of the vertices into blocks of two or three in shuffled
/// order; blocks are arbitrary vertex sets, not cliques.
fn random_block_partition(n: usize, rng: &mut ChaCha8Rng) -> Result<BlockCover> {
    let mut vs: Vec<u32> = (0..n as u32).collect();
    vs.shuffle(rng);
    let mut parts = Vec::new();
    let mut rest = vs.as_slice();
    while !rest.is_empty() {
        let take = if rest.len() >= 3 && rng.random::<bool>() {
            3
        } else {
            rest.len().min(2)
        };
        parts.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    BlockCover::new(parts)
}

fn fixed_instances() -> Result<Vec<(HardCoreInstance, CliqueCover)>> {
    let wheel = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)])?;
    Ok(vec![
        (
            HardCoreInstance::uniform(Graph::path(3), 1.0)?,
            CliqueCover::new(vec![vec![0, 1], vec![2]])?,
        ),
        (
            HardCoreInstance::uniform(Graph::cycle(5)?, 0.7)?,
            CliqueCover::new(vec![vec![0, 1], vec![2, 3], vec![4]])?,
        ),
        (
            HardCoreInstance::new(Graph::complete(4), vec![1.3, 0.5, 2.0, 0.9])?,
            CliqueCover::new(vec![vec![0, 1, 2, 3]])?,
        ),
        (
            HardCoreInstance::new(wheel, vec![0.4, 1.1, 0.9, 1.6, 0.3, 0.8])?,
            CliqueCover::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]])?,
        ),
    ])
}

/// Every dynamics must be a stochastic matrix, stationary and reversible
/// for the Gibbs distribution, ergodic, and the single-site chain must be
/// the singleton-cover clique chain exactly.
fn stationarity_battery(
    seed: u64,
    extra: Option<&HardCoreInstance>,
    checks: &mut Vec<CheckResult>,
) -> Result<()> {
    let mut instances = fixed_instances()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5741_5254);
    for i in 0..5 {
        let inst = random_instance(5 + i % 3, 0.5, &mut rng)?;
        let cover = greedy_clique_cover(inst.graph())?;
        instances.push((inst, cover));
    }
    if let Some(inst) = extra {
        let cover = greedy_clique_cover(inst.graph())?;
        instances.push((inst.clone(), cover));
    }

    let mut pairs = 0u64;
    let mut worst_row = 0.0f64;
    let mut worst_stationary = 0.0f64;
    let mut worst_balance = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut worst_single_site = 0.0f64;

    for (inst, cover) in &instances {
        let pi = stationary_distribution(inst)?;
        let kinds = vec![
            DynamicsKind::Glauber,
            DynamicsKind::Clique(cover.clone()),
            DynamicsKind::Block(BlockCover::new(cover.parts().to_vec())?),
            DynamicsKind::Block(random_block_partition(inst.vertex_count(), &mut rng)?),
        ];
        for kind in &kinds {
            let tm = transition_matrix_exact(inst, kind)?;
            let p = tm.matrix();
            let s = p.nrows();
            for x in 0..s {
                let mut sum = 0.0;
                for y in 0..s {
                    sum += p[(x, y)];
                    // A negative entry is as fatal as a bad row sum.
                    worst_row = worst_row.max(-p[(x, y)]);
                }
                worst_row = worst_row.max((sum - 1.0).abs());
            }
            for y in 0..s {
                let mass: f64 = (0..s).map(|x| pi[x] * p[(x, y)]).sum();
                worst_stationary = worst_stationary.max((mass - pi[y]).abs());
            }
            for x in 0..s {
                for y in 0..s {
                    worst_balance =
                        worst_balance.max((pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs());
                }
            }
            min_gap = min_gap.min(1.0 - spectral_gap(p, &pi)?.lambda2);
            pairs += 1;
        }
        let single = transition_matrix_exact(inst, &DynamicsKind::Glauber)?;
        let singleton = transition_matrix_exact(
            inst,
            &DynamicsKind::Clique(singleton_cover(inst.vertex_count())),
        )?;
        if single.states() == singleton.states() {
            worst_single_site =
                worst_single_site.max((single.matrix() - singleton.matrix()).abs().max());
        } else {
            worst_single_site = f64::INFINITY;
        }
    }

    let detail = format!("{pairs} instance/dynamics pairs");
    checks.push(CheckResult {
        name: "stationarity/rows-are-distributions".into(),
        ok: worst_row <= 1e-12,
        worst: worst_row,
        detail: detail.clone(),
    });
    checks.push(CheckResult {
        name: "stationarity/gibbs-is-stationary".into(),
        ok: worst_stationary <= 1e-10,
        worst: worst_stationary,
        detail: detail.clone(),
    });
    checks.push(CheckResult {
        name: "stationarity/detailed-balance".into(),
        ok: worst_balance <= 1e-10,
        worst: worst_balance,
        detail: detail.clone(),
    });
    checks.push(CheckResult {
        name: "stationarity/ergodic-gap".into(),
        ok: min_gap > 1e-9,
        worst: min_gap,
        detail: format!("smallest 1 - lambda2 over {pairs} pairs"),
    });
    checks.push(CheckResult {
        name: "stationarity/single-site-is-singleton-cover".into(),
        ok: worst_single_site == 0.0,
        worst: worst_single_site,
        detail: format!("entrywise over {} instances", instances.len()),
    });
    Ok(())
}

/// Pairwise-influence laws: neighbors are suppressed at least by their
/// marginal, pinning vertices unoccupied reduces to the induced instance,
/// and the contraction condition implies the influence bound with
/// `C = 1 / alpha`.
fn influence_battery(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x494e_464c);
    let mut instances: Vec<HardCoreInstance> =
        fixed_instances()?.into_iter().map(|(inst, _)| inst).collect();
    for _ in 0..10 {
        instances.push(random_instance(6, 0.45, &mut rng)?);
        instances.push(random_instance(7, 0.45, &mut rng)?);
    }

    let mut worst_suppression = f64::NEG_INFINITY;
    let mut edges_checked = 0u64;
    for inst in &instances {
        let psi = pairwise_influence(inst, &PartialConfig::empty())?;
        let mu = marginals(inst, &PartialConfig::empty())?;
        for v in 0..inst.vertex_count() as u32 {
            for &w in inst.graph().neighbors(v) {
                let entry = psi
                    .entry(v, w)
                    .ok_or_else(|| Error::Validation("undefined influence row".into()))?;
                worst_suppression = worst_suppression.max(entry);
                worst_suppression = worst_suppression.max(mu[w as usize] + entry);
                edges_checked += 1;
            }
        }
    }
    checks.push(CheckResult {
        name: "influence/edge-suppression".into(),
        ok: worst_suppression <= 1e-12,
        worst: worst_suppression,
        detail: format!("{edges_checked} directed edges"),
    });

    let mut worst_coherence = 0.0f64;
    let mut pins_checked = 0u64;
    for inst in &instances {
        let n = inst.vertex_count();
        let pinned: Vec<u32> = (0..n as u32)
            .filter(|_| rng.random::<f64>() < 0.3)
            .collect();
        if pinned.len() > n - 2 {
            continue;
        }
        let psi_pinned = pairwise_influence(inst, &PartialConfig::zeros(&pinned))?;
        let rest: Vec<u32> = (0..n as u32).filter(|v| !pinned.contains(v)).collect();
        let (sub, table) = induced_subinstance(inst, &rest)?;
        let psi_sub = pairwise_influence(&sub, &PartialConfig::empty())?;
        for (nv, &ov) in table.iter().enumerate() {
            for (nw, &ow) in table.iter().enumerate() {
                let a = psi_pinned.entry(ov, ow);
                let b = psi_sub.entry(nv as u32, nw as u32);
                match (a, b) {
                    (Some(a), Some(b)) => worst_coherence = worst_coherence.max((a - b).abs()),
                    _ => worst_coherence = f64::INFINITY,
                }
            }
        }
        pins_checked += 1;
    }
    checks.push(CheckResult {
        name: "influence/conditioning-coherence".into(),
        ok: worst_coherence <= 1e-12 && pins_checked > 0,
        worst: worst_coherence,
        detail: format!("unoccupied pins vs induced instance, {pins_checked} pinnings"),
    });

    let mut cases: Vec<(HardCoreInstance, f64)> = Vec::new();
    for n in [3usize, 5, 7, 9] {
        // Degree <= 2 at lambda = 0.2: each row sums to at most
        // 2 (0.2 / 1.2) = 1/3 of the constant test vector, so the
        // contraction holds with alpha = 2/3.
        cases.push((HardCoreInstance::uniform(Graph::path(n), 0.2)?, 2.0 / 3.0));
        cases.push((HardCoreInstance::uniform(Graph::cycle(n)?, 0.2)?, 2.0 / 3.0));
    }
    for _ in 0..4 {
        // Random trees capped at degree 4, lambda = 0.1: rows sum to at
        // most 4 (0.1 / 1.1) = 4/11, giving alpha = 7/11.
        let n = 8usize;
        let mut edges = Vec::new();
        let mut degree = vec![0u32; n];
        for v in 1..n as u32 {
            let mut u = rng.random_range(0..v);
            while degree[u as usize] >= 4 {
                u = rng.random_range(0..v);
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
            edges.push((u, v));
        }
        cases.push((
            HardCoreInstance::uniform(Graph::new(n, &edges)?, 0.1)?,
            7.0 / 11.0,
        ));
    }
    let mut min_slack = f64::INFINITY;
    let mut implication_ok = true;
    let count = cases.len();
    for (inst, alpha) in cases {
        let mu = vec![1.0; inst.vertex_count()];
        let report = cdc_implies_influence_bound_check(&inst, &mu, alpha)?;
        implication_ok &= report.ok && report.condition.passed();
        implication_ok &= (report.c - 1.0 / alpha).abs() < 1e-15;
        min_slack = min_slack.min(report.cdc_worst_slack);
    }
    checks.push(CheckResult {
        name: "influence/contraction-implication".into(),
        ok: implication_ok,
        worst: min_slack,
        detail: format!("paths, cycles, and bounded-degree trees; {count} cases"),
    });
    Ok(())
}

/// Walk-tree laws: the tree recursion reproduces the graph influences, the
/// independent enumeration routes agree, and tree influences factor along
/// paths.
fn saw_battery(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    let mut worst_identity = 0.0f64;
    let mut worst_routes = 0.0f64;
    let mut graphs_checked = 0u64;
    let mut routes_checked = 0u64;
    for n in [4usize, 5] {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(u32, u32)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new(n, &edges)?;
            if !g.is_connected() {
                continue;
            }
            for lambda in [0.3, 1.0] {
                let inst = HardCoreInstance::uniform(g.clone(), lambda)?;
                let report = verify_saw_influence(&inst, 0)?;
                worst_identity = worst_identity.max(report.max_discrepancy);
                if report.routes_cross_checked {
                    worst_routes = worst_routes.max(report.max_route_discrepancy);
                    routes_checked += 1;
                }
                graphs_checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5341_5754);
    for _ in 0..10 {
        let inst = random_instance(7, 0.35, &mut rng)?;
        for root in [0u32, 3, 6] {
            let report = verify_saw_influence(&inst, root)?;
            worst_identity = worst_identity.max(report.max_discrepancy);
            if report.routes_cross_checked {
                worst_routes = worst_routes.max(report.max_route_discrepancy);
                routes_checked += 1;
            }
            graphs_checked += 1;
        }
    }
    checks.push(CheckResult {
        name: "saw/walk-tree-identity".into(),
        ok: worst_identity <= 1e-10 && graphs_checked > 100,
        worst: worst_identity,
        detail: format!(
            "all connected graphs on 4-5 vertices plus random ones; {graphs_checked} roots"
        ),
    });
    checks.push(CheckResult {
        name: "saw/route-agreement".into(),
        ok: worst_routes <= 1e-10 && routes_checked > 100,
        worst: worst_routes,
        detail: format!("recursion vs pinned and surgered enumeration; {routes_checked} trees"),
    });

    let mut worst_mult = 0.0f64;
    let mut mult_ok = true;
    let mut trees = 0u64;
    for n in [5usize, 8, 10] {
        for _ in 0..4 {
            let edges: Vec<(u32, u32)> = (1..n as u32)
                .map(|v| (rng.random_range(0..v), v))
                .collect();
            let weights: Vec<f64> = (0..n).map(|_| 0.2 + 1.3 * rng.random::<f64>()).collect();
            let inst = HardCoreInstance::new(Graph::new(n, &edges)?, weights)?;
            let report = verify_tree_multiplicativity(&inst)?;
            mult_ok &= report.ok;
            worst_mult = worst_mult.max(report.max_error);
            trees += 1;
        }
    }
    checks.push(CheckResult {
        name: "saw/tree-multiplicativity".into(),
        ok: mult_ok,
        worst: worst_mult,
        detail: format!("influence factors along tree paths; {trees} random trees"),
    });

    // A frozen closed form: on the 3-path at fugacity 1 the end-to-end
    // influence is exactly 1/6.
    let p3 = HardCoreInstance::uniform(Graph::path(3), 1.0)?;
    let psi = pairwise_influence(&p3, &PartialConfig::empty())?;
    let frozen = (psi.entry(0, 2).unwrap_or(f64::NAN) - 1.0 / 6.0).abs();
    checks.push(CheckResult {
        name: "saw/frozen-path-influence".into(),
        ok: frozen <= 1e-15,
        worst: frozen,
        detail: "end-to-end influence on the 3-path at fugacity 1 is 1/6".into(),
    });
    Ok(())
}

/// Simplicial-complex laws: the skeleton walk's two-step chain is block
/// dynamics, rows spread uniformly over the other partitions, and the
/// walk only sees weight ratios.
fn complex_battery(seed: u64, checks: &mut Vec<CheckResult>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x434f_4d50);
    let mut worst_two_step = 0.0f64;
    let mut two_step_covered = 0u64;
    let mut worst_mass = 0.0f64;
    let mut mass_covered = 0u64;
    let mut worst_scale = 0.0f64;
    let mut scale_covered = 0u64;

    for _ in 0..12 {
        let inst = random_instance(6, 0.5, &mut rng)?;
        let cover = greedy_clique_cover(inst.graph())?;
        let m = cover.parts().len();
        if m < 2 {
            continue;
        }
        let rep = complex_representation(&inst, &cover)?;

        let two_step = two_step_walk_matrix(&rep)?;
        let block = transition_matrix_exact(
            &inst,
            &DynamicsKind::Block(BlockCover::new(cover.parts().to_vec())?),
        )?;
        if rep.sets() == block.states() {
            worst_two_step = worst_two_step.max((&two_step - block.matrix()).abs().max());
        } else {
            worst_two_step = f64::INFINITY;
        }
        two_step_covered += 1;

        if m >= 3 {
            let k = m as f64;
            let walk = skeleton_walk_matrix(&rep, &[])?;
            let ids = walk.elements();
            for (xi, &x) in ids.iter().enumerate() {
                let px = rep.partition_of(x);
                for j in 0..m {
                    let mass: f64 = ids
                        .iter()
                        .enumerate()
                        .filter(|(_, &y)| rep.partition_of(y) == j)
                        .map(|(yi, _)| walk.matrix()[(xi, yi)])
                        .sum();
                    let expected = if j == px { 0.0 } else { 1.0 / (k - 1.0) };
                    worst_mass = worst_mass.max((mass - expected).abs());
                }
            }
            mass_covered += 1;
        }

        let scaled = rep.scale_weights(2.5)?;
        let a = skeleton_walk_matrix(&rep, &[])?;
        let b = skeleton_walk_matrix(&scaled, &[])?;
        if a.elements() == b.elements() {
            worst_scale = worst_scale.max((a.matrix() - b.matrix()).abs().max());
        } else {
            worst_scale = f64::INFINITY;
        }
        scale_covered += 1;
    }

    checks.push(CheckResult {
        name: "complex/two-step-is-block".into(),
        ok: worst_two_step <= 1e-12 && two_step_covered >= 8,
        worst: worst_two_step,
        detail: format!("down-up walk vs exact block dynamics; {two_step_covered} instances"),
    });
    checks.push(CheckResult {
        name: "complex/skeleton-partition-mass".into(),
        ok: worst_mass <= 1e-12 && mass_covered >= 3,
        worst: worst_mass,
        detail: format!("uniform 1/(k-1) mass per other partition; {mass_covered} instances"),
    });
    checks.push(CheckResult {
        name: "complex/scale-invariance".into(),
        ok: worst_scale <= 1e-12 && scale_covered >= 8,
        worst: worst_scale,
        detail: format!("skeleton walk under weight scaling; {scale_covered} instances"),
    });
    Ok(())
}

/// Eigenvalue bounds: the skeleton walk's second eigenvalue against the
/// element-influence bound and the universal path bound, the clique-vs-
/// block comparison, the certified subset eigenvalue cap, and the
/// row-domination bound on the spectral radius.
fn bounds_battery(extra: Option<&HardCoreInstance>, checks: &mut Vec<CheckResult>) -> Result<()> {
    let fixed: Vec<(HardCoreInstance, CliqueCover)> = vec![
        (
            HardCoreInstance::uniform(Graph::cycle(5)?, 0.3)?,
            CliqueCover::new(vec![vec![0, 1], vec![2, 3], vec![4]])?,
        ),
        (
            HardCoreInstance::uniform(Graph::path(4), 0.5)?,
            CliqueCover::new(vec![vec![0, 1], vec![2, 3]])?,
        ),
    ];

    let mut eigen_slack = f64::INFINITY;
    let mut eigen_ok = true;
    let mut path_slack = f64::INFINITY;
    let mut path_ok = true;
    let mut comparison_slack = f64::INFINITY;
    let mut comparison_ok = true;
    let mut subset_slack = f64::INFINITY;
    let mut subset_ok = true;
    let mut subsets_checked = 0u64;
    let mut radius_slack = f64::INFINITY;
    let mut radius_ok = true;
    let mut covered = 0u64;

    let mut run_one = |inst: &HardCoreInstance,
                       cover: &CliqueCover,
                       cert: Option<&InfluenceBoundCertificate>|
     -> Result<()> {
        let report = verify_spectral_bounds(inst, cover, cert)?;
        eigen_ok &= report.eigen_ok;
        eigen_slack = eigen_slack.min(report.eigen_bound - report.lambda2);
        path_ok &= report.path_ok;
        path_slack = path_slack.min(report.path_bound - report.lambda2);
        if let Some(sb) = &report.subset_bound {
            subset_ok &= sb.ok;
            subset_slack = subset_slack.min(sb.bound - sb.max_lambda1);
            subsets_checked += sb.subsets_checked;
        }
        let cmp = verify_clique_block_comparison(inst, cover)?;
        comparison_ok &= cmp.ok;
        comparison_slack = comparison_slack.min(cmp.bound - cmp.lambda2_clique);
        covered += 1;
        Ok(())
    };

    for (inst, cover) in &fixed {
        let q = vec![1.0; inst.vertex_count()];
        let cert = match check_influence_condition(inst, &q, 2.0, SubsetPolicy::Exhaustive)? {
            ConditionCheck::Certificate(cert) => cert,
            ConditionCheck::Counterexample(cx) => {
                return Err(Error::Validation(format!(
                    "the built-in bound instances must satisfy the influence \
                     condition at C = 2, got a counterexample: {cx:?}"
                )))
            }
        };
        run_one(inst, cover, Some(&cert))?;

        // Row domination: the certificate's constant dominates the rows of
        // |psi| against its own test vector, capping the spectral radius.
        let psi = pairwise_influence(inst, &PartialConfig::empty())?;
        let a = psi.fully_defined()?.map(f64::abs);
        let rc = spectral_radius_bound_check(&a, &q, cert.c)?;
        radius_ok &= rc.row_condition_holds && rc.radius_ok;
        radius_slack = radius_slack.min(cert.c - rc.spectral_radius);
    }

    if let Some(inst) = extra {
        let cover = greedy_clique_cover(inst.graph())?;
        if cover.parts().len() >= 2 {
            run_one(inst, &cover, None)?;
        }
    }

    checks.push(CheckResult {
        name: "bounds/eigen-bound".into(),
        ok: eigen_ok,
        worst: eigen_slack,
        detail: format!("lambda2 <= psi_k_lambda1 / (m - 1); {covered} instances"),
    });
    checks.push(CheckResult {
        name: "bounds/path-bound".into(),
        ok: path_ok,
        worst: path_slack,
        detail: format!("lambda2 <= 1 - 1/(12 z_max^2); {covered} instances"),
    });
    checks.push(CheckResult {
        name: "bounds/comparison-bound".into(),
        ok: comparison_ok,
        worst: comparison_slack,
        detail: format!("clique gap within 1/(2 z_max) of the block gap; {covered} instances"),
    });
    checks.push(CheckResult {
        name: "bounds/subset-eigen-cap".into(),
        ok: subset_ok && subsets_checked > 0,
        worst: subset_slack,
        detail: format!("certified C caps induced eigenvalues; {subsets_checked} subsets"),
    });
    checks.push(CheckResult {
        name: "bounds/radius-domination".into(),
        ok: radius_ok,
        worst: radius_slack,
        detail: "row domination caps the spectral radius of |psi|".into(),
    });
    Ok(())
}
