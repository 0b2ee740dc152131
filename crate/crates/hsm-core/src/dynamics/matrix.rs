//! Exact transition matrices, mixing times, and spectral gaps.

use super::{DynamicsKind, BLOCK_ENUM_CAP};
use crate::error::{Error, Result};
use crate::hardcore::{
    enumerate_independent_sets, gibbs_exact, singleton_cover, validate_block_cover,
    validate_clique_cover, CliqueCover, HardCoreInstance, IndependentSet,
};
use nalgebra::{DMatrix, RowDVector};
use std::collections::HashMap;

/// Largest number of states (independent sets) an exact matrix may have.
pub const MATRIX_STATE_CAP: usize = 4096;

/// Hard cap on power iterations in [`mixing_time_exact`].
pub const MIXING_ITER_CAP: u64 = 100_000;

/// A dense transition matrix over the instance's independent sets, indexed
/// in enumeration order (empty set first).
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    states: Vec<IndependentSet>,
    index: HashMap<IndependentSet, usize>,
    p: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn states(&self) -> &[IndependentSet] {
        &self.states
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &IndependentSet) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Largest deviation of a row sum from 1.
    pub fn worst_row_sum_error(&self) -> f64 {
        (0..self.p.nrows())
            .map(|i| (self.p.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

struct StateSpace {
    states: Vec<IndependentSet>,
    masks: Vec<u32>,
    by_mask: HashMap<u32, usize>,
    adj_masks: Vec<u32>,
}

fn state_space(inst: &HardCoreInstance) -> Result<StateSpace> {
    let n = inst.vertex_count();
    let states: Vec<IndependentSet> = enumerate_independent_sets(inst.graph())?.collect();
    if states.len() > MATRIX_STATE_CAP {
        return Err(Error::CapExceeded {
            what: "exact transition matrix",
            got: states.len() as u128,
            limit: MATRIX_STATE_CAP as u128,
        });
    }
    let masks: Vec<u32> = states
        .iter()
        .map(|s| s.vertices().iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let by_mask = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let adj_masks = (0..n as u32)
        .map(|v| {
            inst.graph()
                .neighbors(v)
                .iter()
                .fold(0u32, |m, &w| m | 1 << w)
        })
        .collect();
    Ok(StateSpace {
        states,
        masks,
        by_mask,
        adj_masks,
    })
}

fn clique_matrix(inst: &HardCoreInstance, cover: &CliqueCover, space: &StateSpace) -> DMatrix<f64> {
    let s = space.states.len();
    let m = cover.len() as f64;
    let mut p = DMatrix::zeros(s, s);
    let part_masks: Vec<u32> = cover
        .parts()
        .iter()
        .map(|part| part.iter().fold(0u32, |acc, &v| acc | 1 << v))
        .collect();
    for (si, &mask) in space.masks.iter().enumerate() {
        for (ki, part) in cover.parts().iter().enumerate() {
            let z_i = 1.0 + part.iter().map(|&v| inst.weight(v)).sum::<f64>();
            // Empty proposal: evict the clique.
            let target = space.by_mask[&(mask & !part_masks[ki])];
            p[(si, target)] += (1.0 / m) / z_i;
            // Vertex proposals.
            for &v in part {
                let compatible = space.adj_masks[v as usize] & mask == 0;
                let target = if compatible {
                    space.by_mask[&(mask | 1 << v)]
                } else {
                    si
                };
                p[(si, target)] += (1.0 / m) * inst.weight(v) / z_i;
            }
        }
    }
    p
}

fn block_matrix(
    inst: &HardCoreInstance,
    blocks: &[Vec<u32>],
    space: &StateSpace,
) -> DMatrix<f64> {
    let s = space.states.len();
    let m = blocks.len() as f64;
    let mut p = DMatrix::zeros(s, s);
    for (si, &mask) in space.masks.iter().enumerate() {
        for block in blocks {
            let block_mask = block.iter().fold(0u32, |acc, &v| acc | 1 << v);
            let outside = mask & !block_mask;
            // Vertices of the block admissible against the outside.
            let free: Vec<u32> = block
                .iter()
                .copied()
                .filter(|&v| space.adj_masks[v as usize] & outside == 0)
                .collect();
            // All independent subsets of `free`, with weights.
            let mut subsets: Vec<(u32, f64)> = vec![(0, 1.0)];
            let mut stack: Vec<(usize, u32, f64)> = vec![(0, 0, 1.0)];
            while let Some((from, chosen, weight)) = stack.pop() {
                for (idx, &v) in free.iter().enumerate().skip(from) {
                    if space.adj_masks[v as usize] & chosen != 0 {
                        continue;
                    }
                    let next = chosen | 1 << v;
                    let w = weight * inst.weight(v);
                    subsets.push((next, w));
                    stack.push((idx + 1, next, w));
                }
            }
            let total: f64 = subsets.iter().map(|&(_, w)| w).sum();
            for &(sub, w) in &subsets {
                let target = space.by_mask[&(outside | sub)];
                p[(si, target)] += (1.0 / m) * w / total;
            }
        }
    }
    p
}

/// Builds the exact transition matrix of the chosen dynamics.
///
/// States are the instance's independent sets in enumeration order; capped
/// at [`MATRIX_STATE_CAP`] states.
pub fn transition_matrix_exact(
    inst: &HardCoreInstance,
    kind: &DynamicsKind,
) -> Result<TransitionMatrix> {
    let space = state_space(inst)?;
    let p = match kind {
        DynamicsKind::Clique(cover) => {
            let report = validate_clique_cover(inst, cover);
            if !report.valid() {
                return Err(Error::Validation(format!(
                    "clique cover rejected: {}",
                    report.problems.join("; ")
                )));
            }
            clique_matrix(inst, cover, &space)
        }
        DynamicsKind::Block(cover) => {
            validate_block_cover(inst.graph(), cover)?;
            if let Some(part) = cover.parts().iter().find(|p| p.len() > BLOCK_ENUM_CAP) {
                return Err(Error::CapExceeded {
                    what: "block resampling",
                    got: part.len() as u128,
                    limit: BLOCK_ENUM_CAP as u128,
                });
            }
            block_matrix(inst, cover.parts(), &space)
        }
        DynamicsKind::Glauber => {
            let cover = singleton_cover(inst.vertex_count());
            clique_matrix(inst, &cover, &space)
        }
    };
    let index = space
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(TransitionMatrix {
        states: space.states,
        index,
        p,
    })
}

/// The Gibbs distribution in the same state order transition matrices use.
pub fn stationary_distribution(inst: &HardCoreInstance) -> Result<Vec<f64>> {
    Ok(gibbs_exact(inst)?.probs().to_vec())
}

/// Total-variation distance between two distributions on the same state set.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Validation(format!(
            "distributions have different supports: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Exact mixing time: the first step at which the distribution started from
/// `start` is within total-variation `eps` of the Gibbs distribution.
///
/// Iterates the distribution row vector through the exact matrix; errors
/// with [`Error::MixingCapReached`] after [`MIXING_ITER_CAP`] steps.
pub fn mixing_time_exact(
    inst: &HardCoreInstance,
    kind: &DynamicsKind,
    eps: f64,
    start: &IndependentSet,
) -> Result<u64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Validation(format!(
            "target distance must be positive and finite, got {eps}"
        )));
    }
    let tm = transition_matrix_exact(inst, kind)?;
    let pi = stationary_distribution(inst)?;
    let start_idx = tm.index_of(start).ok_or_else(|| {
        Error::Validation(format!(
            "start {:?} is not an independent set of the instance",
            start.vertices()
        ))
    })?;
    let mut row = RowDVector::zeros(tm.len());
    row[start_idx] = 1.0;
    let mut t = 0u64;
    loop {
        let dist = tv_distance(row.as_slice(), &pi)?;
        if dist <= eps {
            return Ok(t);
        }
        if t >= MIXING_ITER_CAP {
            return Err(Error::MixingCapReached {
                cap: MIXING_ITER_CAP,
            });
        }
        row *= tm.matrix();
        t += 1;
    }
}

/// Spectral data of a reversible transition matrix.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SpectralGap {
    /// Second-largest eigenvalue.
    pub lambda2: f64,
    /// Most negative eigenvalue.
    pub lambda_min: f64,
    /// `1 - max(lambda2, |lambda_min|)`.
    pub gap: f64,
}

/// Eigenvalues of a transition matrix reversible with respect to `pi`.
///
/// Detailed balance is checked to 1e-9 first; the matrix is then
/// symmetrized as `D^(1/2) P D^(-1/2)` and solved with a symmetric
/// eigensolver, so all eigenvalues are real.
pub fn spectral_gap(p: &DMatrix<f64>, pi: &[f64]) -> Result<SpectralGap> {
    let s = p.nrows();
    if p.ncols() != s || pi.len() != s {
        return Err(Error::Validation(format!(
            "matrix is {}x{} but the distribution has {} entries",
            p.nrows(),
            p.ncols(),
            pi.len()
        )));
    }
    if s == 0 {
        return Err(Error::Validation("empty matrix".into()));
    }
    if pi.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Validation(
            "stationary distribution must be strictly positive".into(),
        ));
    }
    const REVERSIBILITY_TOL: f64 = 1e-9;
    let mut worst = 0.0f64;
    for i in 0..s {
        for j in 0..s {
            worst = worst.max((pi[i] * p[(i, j)] - pi[j] * p[(j, i)]).abs());
        }
    }
    if worst > REVERSIBILITY_TOL {
        return Err(Error::NotReversible {
            worst,
            tol: REVERSIBILITY_TOL,
        });
    }
    let mut sym = DMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            sym[(i, j)] = (pi[i] / pi[j]).sqrt() * p[(i, j)];
        }
    }
    // Exact symmetry for the solver.
    let sym = (&sym + sym.transpose()) * 0.5;
    let mut eigen: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eigen.sort_by(|a, b| b.partial_cmp(a).expect("real eigenvalues"));
    let lambda2 = if s >= 2 { eigen[1] } else { 0.0 };
    let lambda_min = *eigen.last().expect("nonempty spectrum");
    Ok(SpectralGap {
        lambda2,
        lambda_min,
        gap: 1.0 - lambda2.max(lambda_min.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardcore::{BlockCover, Graph};

    fn p3() -> HardCoreInstance {
        HardCoreInstance::uniform(Graph::path(3), 1.0).unwrap()
    }

    #[test]
    fn rows_are_stochastic() {
        let inst = p3();
        let kinds = [
            DynamicsKind::Glauber,
            DynamicsKind::Clique(CliqueCover::new(vec![vec![0, 1], vec![2]]).unwrap()),
            DynamicsKind::Block(BlockCover::new(vec![vec![0, 1], vec![1, 2]]).unwrap()),
        ];
        for kind in kinds {
            let tm = transition_matrix_exact(&inst, &kind).unwrap();
            assert!(tm.worst_row_sum_error() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn glauber_equals_singleton_clique_dynamics() {
        let inst = HardCoreInstance::new(Graph::cycle(5).unwrap(), vec![0.4, 1.0, 2.0, 0.7, 1.3])
            .unwrap();
        let g = transition_matrix_exact(&inst, &DynamicsKind::Glauber).unwrap();
        let c = transition_matrix_exact(
            &inst,
            &DynamicsKind::Clique(singleton_cover(5)),
        )
        .unwrap();
        assert_eq!(g.matrix(), c.matrix());
    }

    #[test]
    fn single_vertex_clique_dynamics_spectrum() {
        // One vertex, lambda = 1, singleton cover: the chain jumps to a
        // fresh uniform configuration each step, so lambda2 = 0 and the
        // most negative eigenvalue is 0 as well.
        let inst = HardCoreInstance::uniform(Graph::edgeless(1), 1.0).unwrap();
        let tm = transition_matrix_exact(&inst, &DynamicsKind::Glauber).unwrap();
        let pi = stationary_distribution(&inst).unwrap();
        let gap = spectral_gap(tm.matrix(), &pi).unwrap();
        assert!(gap.lambda2.abs() < 1e-12);
        assert!(gap.lambda_min.abs() < 1e-12);
        assert!((gap.gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_matrix_has_zero_gap() {
        let p = DMatrix::identity(3, 3);
        let pi = vec![0.2, 0.3, 0.5];
        let gap = spectral_gap(&p, &pi).unwrap();
        assert_eq!(gap.lambda2, 1.0);
        assert_eq!(gap.gap, 0.0);
    }

    #[test]
    fn non_reversible_matrix_is_rejected() {
        // Deterministic 3-cycle: doubly stochastic, stationary uniform,
        // but pi(i)P(i,j) != pi(j)P(j,i).
        let p = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        );
        let pi = vec![1.0 / 3.0; 3];
        match spectral_gap(&p, &pi) {
            Err(Error::NotReversible { .. }) => {}
            other => panic!("expected reversibility failure, got {other:?}"),
        }
    }

    #[test]
    fn mixing_time_zero_when_target_is_loose() {
        let inst = p3();
        // TV distance can never exceed 1.
        let t = mixing_time_exact(&inst, &DynamicsKind::Glauber, 1.0, &IndependentSet::empty())
            .unwrap();
        assert_eq!(t, 0);
    }

    #[test]
    fn mixing_time_decreases_with_looser_targets() {
        let inst = HardCoreInstance::uniform(Graph::cycle(6).unwrap(), 1.0).unwrap();
        let start = IndependentSet::new(vec![0, 2, 4]).unwrap();
        let kind = DynamicsKind::Glauber;
        let strict = mixing_time_exact(&inst, &kind, 0.01, &start).unwrap();
        let loose = mixing_time_exact(&inst, &kind, 0.25, &start).unwrap();
        assert!(strict > loose);
        assert!(loose > 0);
    }
}
