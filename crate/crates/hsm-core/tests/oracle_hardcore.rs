//! Exact hard-core arithmetic checked against an independent oracle.
//!
//! The oracle enumerates all 2^n vertex subsets as bitmasks and tests
//! independence directly against the raw edge list, sharing no code with
//! the library's streaming enumeration.

use hsm_core::hardcore::{
    enumerate_independent_sets, gibbs_exact, induced_subinstance, marginals,
    partition_function_bruteforce, Graph, HardCoreInstance, PartialConfig,
};
use proptest::prelude::*;

/// Mask-filter oracle: sum of weight products over independent masks.
fn oracle_z(n: usize, edges: &[(u32, u32)], weights: &[f64]) -> f64 {
    assert!(n <= 20);
    let mut total = 0.0;
    'mask: for mask in 0u32..1 << n {
        for &(u, v) in edges {
            if mask >> u & 1 == 1 && mask >> v & 1 == 1 {
                continue 'mask;
            }
        }
        let mut w = 1.0;
        for v in 0..n {
            if mask >> v & 1 == 1 {
                w *= weights[v];
            }
        }
        total += w;
    }
    total
}

/// Oracle marginal of `v`, optionally conditioned on pinned vertices.
fn oracle_marginal(
    n: usize,
    edges: &[(u32, u32)],
    weights: &[f64],
    v: usize,
    ones: &[u32],
    zeros: &[u32],
) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    'mask: for mask in 0u32..1 << n {
        for &(a, b) in edges {
            if mask >> a & 1 == 1 && mask >> b & 1 == 1 {
                continue 'mask;
            }
        }
        if ones.iter().any(|&o| mask >> o & 1 == 0) || zeros.iter().any(|&z| mask >> z & 1 == 1) {
            continue;
        }
        let mut w = 1.0;
        for u in 0..n {
            if mask >> u & 1 == 1 {
                w *= weights[u];
            }
        }
        den += w;
        if mask >> v & 1 == 1 {
            num += w;
        }
    }
    num / den
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn frozen_partition_values() {
    let cases: Vec<(Graph, f64, f64)> = vec![
        (Graph::path(3), 1.0, 5.0),
        (Graph::cycle(5).unwrap(), 1.0, 11.0),
        (Graph::complete(4), 2.0, 9.0),
        (Graph::edgeless(1), 3.0, 4.0),
        (Graph::edgeless(4), 0.5, 1.5f64.powi(4)),
    ];
    for (g, lambda, expect) in cases {
        let inst = HardCoreInstance::uniform(g, lambda).unwrap();
        let z = partition_function_bruteforce(&inst).unwrap();
        assert!(close(z, expect, 1e-13), "got {z}, expected {expect}");
    }
}

#[test]
fn enumeration_is_lexicographic_and_complete() {
    let g = Graph::path(3);
    let inst = HardCoreInstance::uniform(g.clone(), 1.0).unwrap();
    let sets: Vec<Vec<u32>> = enumerate_independent_sets(inst.graph())
        .unwrap()
        .map(|s| s.vertices().to_vec())
        .collect();
    assert_eq!(
        sets,
        vec![vec![], vec![0], vec![0, 2], vec![1], vec![2]],
        "empty set first, then lexicographic order of member lists"
    );
}

#[test]
fn gibbs_table_matches_the_oracle() {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
    let weights = [0.7, 1.3, 0.4, 2.1];
    let g = Graph::new(4, &edges).unwrap();
    let inst = HardCoreInstance::new(g, weights.to_vec()).unwrap();
    let table = gibbs_exact(&inst).unwrap();
    let z = oracle_z(4, &edges, &weights);
    assert!(close(table.z(), z, 1e-13));
    let total: f64 = table.probs().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    for (set, &p) in table.sets().iter().zip(table.probs()) {
        let w: f64 = set.vertices().iter().map(|&v| weights[v as usize]).product();
        assert!(close(p, w / z, 1e-12));
    }
}

#[test]
fn marginals_match_the_oracle_with_and_without_pins() {
    let edges = [(0, 1), (1, 2), (2, 3)];
    let weights = [1.0, 0.8, 1.9, 0.6];
    let g = Graph::new(4, &edges).unwrap();
    let inst = HardCoreInstance::new(g, weights.to_vec()).unwrap();

    let free = marginals(&inst, &PartialConfig::empty()).unwrap();
    for v in 0..4 {
        let want = oracle_marginal(4, &edges, &weights, v, &[], &[]);
        assert!(close(free[v], want, 1e-12), "vertex {v}");
    }

    let cond = PartialConfig::ones(&[0]).set(3, false);
    let pinned = marginals(&inst, &cond).unwrap();
    for v in [2usize] {
        let want = oracle_marginal(4, &edges, &weights, v, &[0], &[3]);
        assert!(close(pinned[v], want, 1e-12), "vertex {v}");
    }
    assert!((pinned[0] - 1.0).abs() < 1e-15);
    assert!(pinned[1].abs() < 1e-15, "neighbor of a pinned-occupied vertex");
    assert!(pinned[3].abs() < 1e-15);
}

/// Random graph strategy: n vertices, independent edge flags, random
/// fugacities bounded away from 0.
fn instance_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        let k = pairs.len();
        (
            Just(n),
            proptest::collection::vec(any::<bool>(), k).prop_map(move |flags| {
                pairs
                    .iter()
                    .zip(&flags)
                    .filter(|(_, &f)| f)
                    .map(|(&e, _)| e)
                    .collect::<Vec<_>>()
            }),
            proptest::collection::vec(0.05f64..3.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brute_force_matches_the_mask_oracle((n, edges, weights) in instance_strategy(10)) {
        let g = Graph::new(n, &edges).unwrap();
        let inst = HardCoreInstance::new(g, weights.clone()).unwrap();
        let z = partition_function_bruteforce(&inst).unwrap();
        let want = oracle_z(n, &edges, &weights);
        prop_assert!(close(z, want, 1e-11), "{z} vs {want}");
    }

    #[test]
    fn deletion_contraction_recurrence((n, edges, weights) in instance_strategy(10)) {
        // Z(G) = Z(G - v) + lambda_v * Z(G - N[v]) for v = 0.
        let g = Graph::new(n, &edges).unwrap();
        let inst = HardCoreInstance::new(g, weights.clone()).unwrap();
        let z = partition_function_bruteforce(&inst).unwrap();

        let rest: Vec<u32> = (1..n as u32).collect();
        let (minus_v, _) = induced_subinstance(&inst, &rest).unwrap();
        let z_minus_v = partition_function_bruteforce(&minus_v).unwrap();

        let closed: Vec<u32> = inst.graph().neighbors(0).iter().copied().chain([0]).collect();
        let far: Vec<u32> = (0..n as u32).filter(|v| !closed.contains(v)).collect();
        let z_minus_ball = if far.is_empty() {
            1.0
        } else {
            let (minus_ball, _) = induced_subinstance(&inst, &far).unwrap();
            partition_function_bruteforce(&minus_ball).unwrap()
        };

        let rhs = z_minus_v + weights[0] * z_minus_ball;
        prop_assert!(close(z, rhs, 1e-11), "{z} vs {rhs}");
    }

    #[test]
    fn gibbs_z_agrees_with_brute_force((n, edges, weights) in instance_strategy(9)) {
        let g = Graph::new(n, &edges).unwrap();
        let inst = HardCoreInstance::new(g, weights).unwrap();
        let z = partition_function_bruteforce(&inst).unwrap();
        let table = gibbs_exact(&inst).unwrap();
        prop_assert!(close(table.z(), z, 1e-12));
        prop_assert_eq!(table.len(), enumerate_independent_sets(inst.graph()).unwrap().count());
    }
}
