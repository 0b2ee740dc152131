//! Acceptance battery: nine end-to-end criteria covering the exact oracle,
//! the dynamics laws, the spectral inequalities, the influence machinery,
//! the estimator, the hard-sphere pipeline, and the degree arithmetic.
//!
//! Each criterion prints exactly one `ACCEPTANCE <n> <name>: PASS/FAIL`
//! line (written straight to the real stdout so it shows up even under
//! the harness's output capture) and fails its test on violation. All
//! tolerances are pinned here as constants.

use hsm_core::dynamics::{stationary_distribution, transition_matrix_exact, DynamicsKind};
use hsm_core::hardcore::{
    induced_subinstance, marginals, partition_function_bruteforce, tree_threshold, BlockCover,
    CliqueCover, Graph, HardCoreInstance, PartialConfig,
};
use hsm_core::hs::{max_degree_bound, Discretization, EdgeRule, HardSphereInstance};
use hsm_core::spectral::{
    cdc_implies_influence_bound_check, check_strict_cdc, complex_representation,
    two_step_walk_matrix, verify_clique_block_comparison, verify_saw_influence,
    verify_spectral_bounds, verify_tree_multiplicativity,
};
use hsm_core::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write as _;
use std::process::Command;
use std::time::Instant;

// Pinned tolerances and thresholds, one block per criterion.
const EXACT_REL_TOL: f64 = 1e-12;
const STATIONARITY_TOL: f64 = 1e-10;
const BLOCK_EQUIV_TOL: f64 = 1e-12;
const SAW_TOL: f64 = 1e-10;
const TREE_MULT_TOL: f64 = 1e-12;
const EST_EPSILON: &str = "0.1";
const EST_REL_BAND: f64 = 0.10;
const EST_RUNS: u32 = 200; // 20 instances x 10 seeds
const EST_REQUIRED_HITS: u32 = 180; // 90% of the runs
const CONV_EPSILON: &str = "0.04";
const CONV_SEED: &str = "1";
const SLOPE_LO: f64 = -1.5;
const SLOPE_HI: f64 = -0.5;
const TONKS_REFERENCE: f64 = 10.875; // exact hard-rod value at ell=4, lambda=1
const HS_REL_BAND: f64 = 0.3;
const HS_REQUIRED_HITS: u32 = 8; // of 10 seeded runs
const TOY_2D_TIME_LIMIT_SECS: f64 = 900.0;
const DEGREE_BOUND_TOL: f64 = 1e-9;

/// Returns early with a formatted failure message when the condition fails.
macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

/// Writes one line to the real stdout, bypassing the harness capture.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.write_all(b"\n");
    let _ = out.flush();
}

/// Runs one criterion body, prints its PASS/FAIL line, and panics on FAIL.
fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = body();
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => report(&format!(
            "ACCEPTANCE {number} {name}: PASS ({secs:.1}s) {detail}"
        )),
        Err(why) => {
            report(&format!("ACCEPTANCE {number} {name}: FAIL ({secs:.1}s) {why}"));
            panic!("acceptance criterion {number} ({name}) failed: {why}");
        }
    }
}

fn core<T>(r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn hsm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hsm"))
        .args(args)
        .env_remove("HSM_THREADS")
        .output()
        .expect("spawn hsm binary")
}

fn random_graph(n: usize, edge_p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.random::<f64>() < edge_p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).expect("pair list is valid")
}

fn random_weights(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

/// Greedy clique partition over a shuffled vertex order: every vertex joins
/// the first part it is adjacent to in full, else opens a new part.
fn shuffled_clique_cover(g: &Graph, rng: &mut ChaCha8Rng) -> Result<CliqueCover, String> {
    let mut order: Vec<u32> = (0..g.vertex_count() as u32).collect();
    order.shuffle(rng);
    let mut parts: Vec<Vec<u32>> = Vec::new();
    for &v in &order {
        match parts
            .iter_mut()
            .find(|part| part.iter().all(|&u| g.is_edge(u, v)))
        {
            Some(part) => part.push(v),
            None => parts.push(vec![v]),
        }
    }
    core(CliqueCover::new(parts))
}

/// Random partition into blocks of two or three (arbitrary vertex sets).
fn random_block_partition(n: usize, rng: &mut ChaCha8Rng) -> Result<BlockCover, String> {
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
    core(BlockCover::new(parts))
}

/// Random tree grown by attaching each new vertex to an earlier vertex
/// whose degree is still below `max_deg`.
fn random_tree(n: usize, max_deg: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    for v in 1..n {
        loop {
            let u = rng.random_range(0..v);
            if deg[u] < max_deg {
                edges.push((u as u32, v as u32));
                deg[u] += 1;
                deg[v] += 1;
                break;
            }
        }
    }
    Graph::new(n, &edges).expect("tree edges are valid")
}

// ---------------------------------------------------------------------
// 1. Exact oracle: hand-checked values, marginals, deletion recurrence.
// ---------------------------------------------------------------------

#[test]
fn criterion_1_exact_oracle() {
    criterion(1, "exact-oracle", || {
        let mut worst = 0.0f64;
        let mut check_rel = |got: f64, want: f64, what: &str| -> Result<(), String> {
            let rel = (got - want).abs() / want.abs().max(1e-300);
            if rel > worst {
                worst = rel;
            }
            ensure!(
                rel <= EXACT_REL_TOL,
                "{what}: got {got}, want {want} (rel {rel:.3e})"
            );
            Ok(())
        };

        // Hand-checked partition functions and occupation marginals.
        let p3 = core(HardCoreInstance::uniform(Graph::path(3), 1.0))?;
        check_rel(core(partition_function_bruteforce(&p3))?, 5.0, "Z(path-3)")?;
        let m = core(marginals(&p3, &PartialConfig::empty()))?;
        for (v, want) in [(0, 0.4), (1, 0.2), (2, 0.4)] {
            check_rel(m[v], want, "path-3 marginal")?;
        }

        let k3 = core(HardCoreInstance::uniform(Graph::complete(3), 1.0))?;
        check_rel(core(partition_function_bruteforce(&k3))?, 4.0, "Z(triangle)")?;
        let m = core(marginals(&k3, &PartialConfig::empty()))?;
        for v in 0..3 {
            check_rel(m[v], 0.25, "triangle marginal")?;
        }

        for (n, lambda) in [(1usize, 0.5f64), (5, 1.0), (9, 2.5)] {
            let free = core(HardCoreInstance::uniform(Graph::edgeless(n), lambda))?;
            check_rel(
                core(partition_function_bruteforce(&free))?,
                (1.0 + lambda).powi(n as i32),
                "Z(edgeless)",
            )?;
            let m = core(marginals(&free, &PartialConfig::empty()))?;
            for v in 0..n {
                check_rel(m[v], lambda / (1.0 + lambda), "edgeless marginal")?;
            }
        }

        // Deletion recurrence Z(G) = Z(G - v) + w(v) Z(G - N[v]) on random
        // graphs, with v drawn at random.
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
        for case in 0..200 {
            let n = rng.random_range(2..=14);
            let p = 0.1 + 0.5 * rng.random::<f64>();
            let graph = random_graph(n, p, &mut rng);
            let weights = random_weights(n, 0.2, 2.0, &mut rng);
            let inst = core(HardCoreInstance::new(graph, weights))?;
            let v = rng.random_range(0..n) as u32;

            let z = core(partition_function_bruteforce(&inst))?;
            let without_v: Vec<u32> = (0..n as u32).filter(|&u| u != v).collect();
            let closed = inst.graph().closed_neighborhood(v);
            let without_ball: Vec<u32> = (0..n as u32)
                .filter(|u| !closed.contains(u))
                .collect();
            let (sub_v, _) = core(induced_subinstance(&inst, &without_v))?;
            let (sub_ball, _) = core(induced_subinstance(&inst, &without_ball))?;
            let recurrence = core(partition_function_bruteforce(&sub_v))?
                + inst.weight(v) * core(partition_function_bruteforce(&sub_ball))?;
            check_rel(z, recurrence, &format!("recurrence case {case} (n={n})"))?;
        }

        Ok(format!(
            "hand-checked values + 200 random deletion recurrences; worst rel {worst:.2e}"
        ))
    });
}

// ---------------------------------------------------------------------
// 2. Stationarity and reversibility of all three exact dynamics.
// ---------------------------------------------------------------------

#[test]
fn criterion_2_stationarity_and_reversibility() {
    criterion(2, "stationarity-reversibility", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
        let mut worst = 0.0f64;
        for case in 0..100 {
            let n = rng.random_range(4..=9);
            let graph = random_graph(n, 0.4, &mut rng);
            let weights = random_weights(n, 0.2, 2.0, &mut rng);
            let inst = core(HardCoreInstance::new(graph, weights))?;
            let cover = shuffled_clique_cover(inst.graph(), &mut rng)?;
            let blocks = random_block_partition(n, &mut rng)?;
            let pi = core(stationary_distribution(&inst))?;
            for kind in [
                DynamicsKind::Clique(cover.clone()),
                DynamicsKind::Block(blocks.clone()),
                DynamicsKind::Glauber,
            ] {
                let tm = core(transition_matrix_exact(&inst, &kind))?;
                let p = tm.matrix();
                let s = tm.len();
                for j in 0..s {
                    let mut flow = 0.0;
                    for i in 0..s {
                        flow += pi[i] * p[(i, j)];
                    }
                    worst = worst.max((flow - pi[j]).abs());
                }
                for i in 0..s {
                    for j in 0..s {
                        worst = worst.max((pi[i] * p[(i, j)] - pi[j] * p[(j, i)]).abs());
                    }
                }
                ensure!(
                    worst <= STATIONARITY_TOL,
                    "case {case} (n={n}, {kind:?}): stationarity/balance residual {worst:.3e}"
                );
            }
        }
        Ok(format!(
            "100 instances x 3 dynamics; worst residual {worst:.2e}"
        ))
    });
}

// ---------------------------------------------------------------------
// 3 & 4 share one battery of disjoint-cover instances with m in {2,3,4}.
// ---------------------------------------------------------------------

fn disjoint_cover_battery() -> Result<Vec<(HardCoreInstance, CliqueCover)>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC3);
    let mut battery = Vec::new();
    while battery.len() < 50 {
        let n = rng.random_range(5..=8);
        let graph = random_graph(n, 0.5, &mut rng);
        let weights = random_weights(n, 0.2, 2.0, &mut rng);
        let cover = shuffled_clique_cover(&graph, &mut rng)?;
        if (2..=4).contains(&cover.len()) {
            battery.push((core(HardCoreInstance::new(graph, weights))?, cover));
        }
    }
    Ok(battery)
}

#[test]
fn criterion_3_two_step_walk_equals_block_dynamics() {
    criterion(3, "two-step-block-equivalence", || {
        let battery = disjoint_cover_battery()?;
        let mut worst = 0.0f64;
        let mut sizes_seen = [false; 3];
        for (idx, (inst, cover)) in battery.iter().enumerate() {
            sizes_seen[cover.len() - 2] = true;
            let rep = core(complex_representation(inst, cover))?;
            let two_step = core(two_step_walk_matrix(&rep))?;
            let blocks = core(BlockCover::new(cover.parts().to_vec()))?;
            let block = core(transition_matrix_exact(inst, &DynamicsKind::Block(blocks)))?;
            ensure!(
                rep.sets() == block.states(),
                "instance {idx}: face enumeration disagrees with the state enumeration"
            );
            let diff = (&two_step - block.matrix()).abs().max();
            worst = worst.max(diff);
            ensure!(
                diff <= BLOCK_EQUIV_TOL,
                "instance {idx} (m={}): entrywise gap {diff:.3e}",
                cover.len()
            );
        }
        ensure!(
            sizes_seen.iter().all(|&s| s),
            "battery never produced some cover size in {{2,3,4}}"
        );
        Ok(format!(
            "50 disjoint-cover instances, m in {{2,3,4}}; worst entrywise gap {worst:.2e}"
        ))
    });
}

#[test]
fn criterion_4_spectral_inequalities() {
    criterion(4, "spectral-inequalities", || {
        let battery = disjoint_cover_battery()?;
        let mut min_eigen_slack = f64::INFINITY;
        let mut min_path_slack = f64::INFINITY;
        let mut min_comparison_slack = f64::INFINITY;
        for (idx, (inst, cover)) in battery.iter().enumerate() {
            let rep = core(verify_spectral_bounds(inst, cover, None))?;
            min_eigen_slack = min_eigen_slack.min(rep.eigen_bound - rep.lambda2);
            min_path_slack = min_path_slack.min(rep.path_bound - rep.lambda2);
            ensure!(
                rep.eigen_ok,
                "instance {idx}: influence-eigenvalue cap violated: lambda2 {} vs bound {}",
                rep.lambda2,
                rep.eigen_bound
            );
            ensure!(
                rep.path_ok,
                "instance {idx}: congestion cap violated: lambda2 {} vs bound {}",
                rep.lambda2,
                rep.path_bound
            );
            let cmp = core(verify_clique_block_comparison(inst, cover))?;
            min_comparison_slack = min_comparison_slack.min(cmp.bound - cmp.lambda2_clique);
            ensure!(
                cmp.ok,
                "instance {idx}: clique-vs-block gap comparison violated: {} vs bound {}",
                cmp.lambda2_clique,
                cmp.bound
            );
        }
        Ok(format!(
            "50 instances; smallest slacks: eigen {min_eigen_slack:.2e}, congestion {min_path_slack:.2e}, comparison {min_comparison_slack:.2e}"
        ))
    });
}

// ---------------------------------------------------------------------
// 5. Influence machinery: walk-tree identity, tree multiplicativity,
//    and the contraction condition implying the influence bound.
// ---------------------------------------------------------------------

#[test]
fn criterion_5_influence_machinery() {
    criterion(5, "influence-machinery", || {
        // Walk-tree identity on every connected graph with up to 6
        // vertices (all labeled edge sets), rooted at vertex 0.
        let mut worst_saw = 0.0f64;
        let mut exhaustive = 0u64;
        for n in 1..=6usize {
            let pairs: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
                .collect();
            for mask in 0u32..1 << pairs.len() {
                let edges: Vec<(u32, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let graph = core(Graph::new(n, &edges))?;
                if !graph.is_connected() {
                    continue;
                }
                let inst = core(HardCoreInstance::uniform(graph, 1.0))?;
                let rep = core(verify_saw_influence(&inst, 0))?;
                worst_saw = worst_saw.max(rep.max_discrepancy);
                ensure!(
                    rep.max_discrepancy <= SAW_TOL,
                    "n={n} mask={mask}: walk-tree identity off by {:.3e}",
                    rep.max_discrepancy
                );
                exhaustive += 1;
            }
        }
        ensure!(exhaustive > 27_000, "labeled-graph sweep looks truncated");

        // Plus 50 random larger graphs, three roots each; graphs whose
        // walk tree overflows the cap are redrawn.
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
        let mut random_checked = 0;
        while random_checked < 50 {
            let n = rng.random_range(7..=9);
            let graph = random_graph(n, 0.3, &mut rng);
            let weights = random_weights(n, 0.3, 1.5, &mut rng);
            let inst = core(HardCoreInstance::new(graph, weights))?;
            let mut ok = true;
            for root in [0, n as u32 / 2, n as u32 - 1] {
                match verify_saw_influence(&inst, root) {
                    Ok(rep) => {
                        worst_saw = worst_saw.max(rep.max_discrepancy);
                        ensure!(
                            rep.max_discrepancy <= SAW_TOL,
                            "random graph (n={n}, root {root}): identity off by {:.3e}",
                            rep.max_discrepancy
                        );
                    }
                    Err(Error::CapExceeded { .. }) => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
            if ok {
                random_checked += 1;
            }
        }

        // Influence multiplicativity along tree paths.
        let mut worst_tree = 0.0f64;
        for _ in 0..30 {
            let n = rng.random_range(3..=12);
            let tree = random_tree(n, n, &mut rng);
            let inst = core(HardCoreInstance::new(tree, random_weights(n, 0.2, 2.0, &mut rng)))?;
            let rep = core(verify_tree_multiplicativity(&inst))?;
            worst_tree = worst_tree.max(rep.max_error);
            ensure!(
                rep.ok && rep.max_error <= TREE_MULT_TOL,
                "tree (n={n}): path factorization off by {:.3e}",
                rep.max_error
            );
        }

        // Contraction condition => influence bound with C = 1/alpha,
        // exhaustively over induced subgraphs, on 30 satisfying instances.
        let mut cdc_checked = 0;
        let mut min_slack = f64::INFINITY;
        let mut run_cdc = |inst: &HardCoreInstance, alpha: f64| -> Result<(), String> {
            let mu = vec![1.0; inst.vertex_count()];
            let pre = core(check_strict_cdc(inst, &mu, alpha))?;
            ensure!(pre.passed(), "picked instance does not satisfy the contraction condition");
            let rep = core(cdc_implies_influence_bound_check(inst, &mu, alpha))?;
            min_slack = min_slack.min(rep.cdc_worst_slack);
            ensure!(
                rep.ok && rep.condition.passed(),
                "contraction implication failed (alpha {alpha}): {rep:?}"
            );
            cdc_checked += 1;
            Ok(())
        };
        for n in 3..=10usize {
            let path = core(HardCoreInstance::uniform(Graph::path(n), 0.2))?;
            run_cdc(&path, 2.0 / 3.0)?;
            let cycle = core(HardCoreInstance::uniform(core(Graph::cycle(n))?, 0.2))?;
            run_cdc(&cycle, 2.0 / 3.0)?;
        }
        let mut trees_done = 0;
        while trees_done < 14 {
            let n = rng.random_range(8..=10);
            let tree = random_tree(n, 4, &mut rng);
            let inst = core(HardCoreInstance::uniform(tree, 0.1))?;
            let mu = vec![1.0; n];
            if !core(check_strict_cdc(&inst, &mu, 7.0 / 11.0))?.passed() {
                continue;
            }
            run_cdc(&inst, 7.0 / 11.0)?;
            trees_done += 1;
        }
        ensure!(cdc_checked == 30, "expected 30 contraction instances, ran {cdc_checked}");

        Ok(format!(
            "walk-tree identity on {exhaustive} labeled + 50 random graphs (worst {worst_saw:.2e}); \
             30 trees multiplicative (worst {worst_tree:.2e}); \
             30 contraction implications (min slack {min_slack:.2e})"
        ))
    });
}

// ---------------------------------------------------------------------
// 6. Estimator accuracy through the real binary.
// ---------------------------------------------------------------------

#[test]
fn criterion_6_estimator_accuracy() {
    criterion(6, "estimator-accuracy", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC6);
        let mut hits = 0u32;
        let mut runs = 0u32;
        let mut worst_rel = 0.0f64;
        for case in 0..20 {
            // Two cliques with sparse cross edges; the cover is the pair
            // of cliques. Weights keep every clique's total mass small.
            let a = rng.random_range(2..=5usize);
            let b = rng.random_range(2..=5usize);
            let n = a + b;
            let mut edges = Vec::new();
            for u in 0..a as u32 {
                for v in u + 1..a as u32 {
                    edges.push((u, v));
                }
            }
            for u in a as u32..n as u32 {
                for v in u + 1..n as u32 {
                    edges.push((u, v));
                }
            }
            for u in 0..a as u32 {
                for v in a as u32..n as u32 {
                    if rng.random::<f64>() < 0.3 {
                        edges.push((u, v));
                    }
                }
            }
            let weights = random_weights(n, 0.06, 0.20, &mut rng);
            let inst = core(HardCoreInstance::new(
                core(Graph::new(n, &edges))?,
                weights.clone(),
            ))?;
            let truth = core(partition_function_bruteforce(&inst))?;

            let inst_path = dir.path().join(format!("inst{case}.json"));
            let doc = serde_json::json!({
                "vertices": n,
                "edges": edges,
                "lambda": weights,
            });
            std::fs::write(&inst_path, doc.to_string()).map_err(|e| e.to_string())?;
            let cover_path = dir.path().join(format!("cover{case}.json"));
            let cover = serde_json::json!([
                (0..a as u32).collect::<Vec<_>>(),
                (a as u32..n as u32).collect::<Vec<_>>(),
            ]);
            std::fs::write(&cover_path, cover.to_string()).map_err(|e| e.to_string())?;

            for seed in 1..=10u32 {
                let out = hsm(&[
                    "estimate",
                    "--instance",
                    inst_path.to_str().unwrap(),
                    "--cover",
                    &format!("@{}", cover_path.display()),
                    "--epsilon",
                    EST_EPSILON,
                    "--seed",
                    &seed.to_string(),
                ]);
                ensure!(
                    out.status.success(),
                    "estimate run failed (case {case}, seed {seed}): {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                let report: serde_json::Value =
                    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
                let est = report["estimate"]
                    .as_f64()
                    .ok_or("report lacks a numeric estimate")?;
                let rel = (est - truth).abs() / truth;
                worst_rel = worst_rel.max(rel);
                runs += 1;
                if rel <= EST_REL_BAND {
                    hits += 1;
                }
            }
        }
        ensure!(runs == EST_RUNS, "expected {EST_RUNS} runs, made {runs}");
        ensure!(
            hits >= EST_REQUIRED_HITS,
            "only {hits}/{runs} runs landed within {:.0}% (need {EST_REQUIRED_HITS})",
            EST_REL_BAND * 100.0
        );
        Ok(format!(
            "{hits}/{runs} runs within {:.0}% of the exact value; worst rel {worst_rel:.2e}",
            EST_REL_BAND * 100.0
        ))
    });
}

// ---------------------------------------------------------------------
// 7. One-dimensional discretization converges to the hard-rod value.
// ---------------------------------------------------------------------

#[test]
fn criterion_7_hard_rod_convergence() {
    criterion(7, "hard-rod-convergence", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let inst = dir.path().join("rods.json");
        std::fs::write(&inst, r#"{"d": 1, "ell": 4.0, "lambda": 1.0}"#)
            .map_err(|e| e.to_string())?;
        let out = hsm(&[
            "converge-study",
            "--instance",
            inst.to_str().unwrap(),
            "--rho-list",
            "4,8,16,32",
            "--epsilon",
            CONV_EPSILON,
            "--seed",
            CONV_SEED,
        ]);
        ensure!(
            out.status.success(),
            "converge-study failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8_lossy(&out.stdout);
        let mut rel_errs = Vec::new();
        let mut slope = None;
        for line in text.lines() {
            if let Some(s) = line.strip_prefix("# loglog_slope=") {
                slope = Some(s.trim().parse::<f64>().map_err(|e| e.to_string())?);
            } else if !line.starts_with("rho,") && !line.is_empty() {
                let cols: Vec<&str> = line.split(',').collect();
                ensure!(cols.len() == 4, "unexpected row {line:?}");
                let z_ref: f64 = cols[2].parse().map_err(|_| format!("bad row {line:?}"))?;
                ensure!(
                    z_ref == TONKS_REFERENCE,
                    "reference column is {z_ref}, want {TONKS_REFERENCE}"
                );
                rel_errs.push(cols[3].parse::<f64>().map_err(|e| e.to_string())?);
            }
        }
        ensure!(rel_errs.len() == 4, "expected 4 rows, got {}", rel_errs.len());
        for w in rel_errs.windows(2) {
            ensure!(
                w[1] < w[0],
                "relative error failed to decrease: {rel_errs:?}"
            );
        }
        let slope = slope.ok_or("missing slope trailer")?;
        ensure!(
            (SLOPE_LO..=SLOPE_HI).contains(&slope),
            "log-log slope {slope} outside [{SLOPE_LO}, {SLOPE_HI}]"
        );
        Ok(format!(
            "rel err {:.4} -> {:.4} over rho 4..32; slope {slope:.3}",
            rel_errs[0],
            rel_errs[3]
        ))
    });
}

// ---------------------------------------------------------------------
// 8. Full pipeline: rods in one dimension, a toy disc system in two.
// ---------------------------------------------------------------------

#[test]
fn criterion_8_end_to_end_pipeline() {
    criterion(8, "end-to-end-pipeline", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let rods = dir.path().join("rods.json");
        std::fs::write(&rods, r#"{"d": 1, "ell": 4.0, "lambda": 1.0}"#)
            .map_err(|e| e.to_string())?;
        let mut hits = 0u32;
        let mut estimates = Vec::new();
        for seed in 1..=10u32 {
            let out = hsm(&[
                "hs-estimate",
                "--instance",
                rods.to_str().unwrap(),
                "--epsilon",
                "0.3",
                "--delta",
                "0.2",
                "--seed",
                &seed.to_string(),
            ]);
            ensure!(
                out.status.success(),
                "rod run failed (seed {seed}): {}",
                String::from_utf8_lossy(&out.stderr)
            );
            let report: serde_json::Value =
                serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
            let est = report["estimate"].as_f64().ok_or("missing estimate")?;
            estimates.push(est);
            if (est - TONKS_REFERENCE).abs() <= HS_REL_BAND * TONKS_REFERENCE {
                hits += 1;
            }
        }
        ensure!(
            hits >= HS_REQUIRED_HITS,
            "only {hits}/10 rod runs within {:.0}% of {TONKS_REFERENCE}: {estimates:?}",
            HS_REL_BAND * 100.0
        );

        let toy = dir.path().join("discs.json");
        std::fs::write(&toy, r#"{"d": 2, "ell": 2.0, "lambda": 0.3}"#)
            .map_err(|e| e.to_string())?;
        let started = Instant::now();
        let out = hsm(&[
            "hs-estimate",
            "--instance",
            toy.to_str().unwrap(),
            "--epsilon",
            "0.5",
            "--seed",
            "3",
        ]);
        let toy_secs = started.elapsed().as_secs_f64();
        ensure!(
            out.status.success(),
            "planar toy run failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        ensure!(
            toy_secs < TOY_2D_TIME_LIMIT_SECS,
            "planar toy run took {toy_secs:.0}s (limit {TOY_2D_TIME_LIMIT_SECS:.0}s)"
        );
        let report: serde_json::Value =
            serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let flags = report["regime_flags"]
            .as_object()
            .ok_or("planar report lacks regime flags")?;
        ensure!(!flags.is_empty(), "regime flag object is empty");
        for (name, value) in flags {
            ensure!(
                value.as_bool() == Some(true),
                "planar toy regime flag {name} is {value}"
            );
        }
        Ok(format!(
            "{hits}/10 rod runs in band; planar toy finished in {toy_secs:.1}s with all {} regime flags true",
            flags.len()
        ))
    });
}

// ---------------------------------------------------------------------
// 9. Degree bound arithmetic on explicit grids; tree-threshold margin.
// ---------------------------------------------------------------------

#[test]
fn criterion_9_degree_and_threshold_arithmetic() {
    criterion(9, "degree-threshold-arithmetic", || {
        let mut qualifying = [0u32; 2];
        let mut worst_margin = f64::INFINITY;
        for d in [1u32, 2] {
            for ell in [1.0f64, 2.0, 4.0] {
                for side in 1..=64i64 {
                    if (side as f64).powi(d as i32) > 4096.0 {
                        continue;
                    }
                    let rho = side as f64 / ell;
                    let hs = core(HardSphereInstance::new(d, ell, 0.5))?;
                    let disc = core(Discretization::new(hs, rho, EdgeRule::Strict))?;
                    let (inst, _) = core(disc.explicit_graph())?;
                    let max_deg = inst.graph().max_degree() as f64;
                    for gamma in [0.3f64, 0.5, 1.0] {
                        let db = core(max_degree_bound(&disc, gamma))?;
                        if !db.precondition_met {
                            continue;
                        }
                        ensure!(
                            rho >= db.rho_threshold,
                            "flag claims the precondition at rho {rho} < threshold {}",
                            db.rho_threshold
                        );
                        worst_margin = worst_margin.min(db.bound - max_deg);
                        ensure!(
                            max_deg <= db.bound + DEGREE_BOUND_TOL,
                            "d={d} ell={ell} side={side} gamma={gamma}: degree {max_deg} > bound {}",
                            db.bound
                        );
                        qualifying[d as usize - 1] += 1;
                    }
                }
            }
        }
        ensure!(
            qualifying.iter().all(|&q| q >= 100),
            "too few grids reach the precondition: {qualifying:?}"
        );

        let mut min_excess = f64::INFINITY;
        for delta in 3u32..=200 {
            let lambda_c = core(tree_threshold(delta))?;
            min_excess = min_excess.min(delta as f64 * lambda_c - std::f64::consts::E);
            ensure!(
                delta as f64 * lambda_c > std::f64::consts::E,
                "degree {delta}: threshold mass {} fails to exceed e",
                delta as f64 * lambda_c
            );
        }
        Ok(format!(
            "{} + {} qualifying grids within the degree bound (min slack {worst_margin:.3}); \
             threshold mass stays above e by >= {min_excess:.4}",
            qualifying[0], qualifying[1]
        ))
    });
}
