//! The hard-core model: vertex-weighted independent sets on a graph.
//!
//! An instance assigns every vertex `v` a positive fugacity `lambda_v`.
//! The weight of an independent set `I` is the product of its members'
//! fugacities, and the partition function is the sum of those weights over
//! all independent sets (the empty set contributes 1). Everything in this
//! module is exact (enumeration-based) and therefore capped at small sizes.

mod cover;
mod enumerate;
mod graph;

pub use cover::{
    singleton_cover, tree_threshold, validate_block_cover, validate_clique_cover, BlockCover,
    CliqueCover, CoverReport,
};
pub use enumerate::{
    enumerate_independent_sets, gibbs_exact, marginals, partition_function_bruteforce, GibbsTable,
    IndependentSetIter, ENUMERATION_CAP,
};
pub use graph::Graph;

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// A hard-core instance: a graph plus a positive, finite fugacity per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HardCoreInstance {
    graph: Graph,
    weights: Vec<f64>,
}

impl HardCoreInstance {
    pub fn new(graph: Graph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.vertex_count() {
            return Err(Error::Validation(format!(
                "{} weights supplied for {} vertices",
                weights.len(),
                graph.vertex_count()
            )));
        }
        for (v, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Validation(format!(
                    "fugacity of vertex {v} must be positive and finite, got {w}"
                )));
            }
        }
        Ok(Self { graph, weights })
    }

    /// Instance with the same fugacity at every vertex.
    pub fn uniform(graph: Graph, lambda: f64) -> Result<Self> {
        let n = graph.vertex_count();
        Self::new(graph, vec![lambda; n])
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn weight(&self, v: u32) -> f64 {
        self.weights[v as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// An independent set, stored as a sorted list of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndependentSet(Vec<u32>);

impl IndependentSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Wraps a vertex list, sorting it. Duplicates are rejected; whether the
    /// set is independent in any particular graph is not checked here.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("repeated vertex in set".into()));
        }
        Ok(Self(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<u32>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self(vertices)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Product of the members' fugacities (1 for the empty set).
    pub fn weight_in(&self, inst: &HardCoreInstance) -> f64 {
        self.0.iter().map(|&v| inst.weight(v)).product()
    }
}

/// A partial spin assignment: some vertices pinned occupied (`true`) or
/// unoccupied (`false`), the rest free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialConfig {
    spins: BTreeMap<u32, bool>,
}

impl PartialConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Pins every vertex in `vs` to occupied.
    pub fn ones(vs: &[u32]) -> Self {
        Self {
            spins: vs.iter().map(|&v| (v, true)).collect(),
        }
    }

    /// Pins every vertex in `vs` to unoccupied.
    pub fn zeros(vs: &[u32]) -> Self {
        Self {
            spins: vs.iter().map(|&v| (v, false)).collect(),
        }
    }

    /// Adds or overwrites one pin.
    pub fn set(mut self, v: u32, occupied: bool) -> Self {
        self.spins.insert(v, occupied);
        self
    }

    pub fn get(&self, v: u32) -> Option<bool> {
        self.spins.get(&v).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Pinned vertices in increasing order.
    pub fn domain(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.spins.iter().map(|(&v, &s)| (v, s))
    }

    /// True if the independent set agrees with every pin.
    pub fn consistent_with(&self, set: &IndependentSet) -> bool {
        self.spins.iter().all(|(&v, &s)| set.contains(v) == s)
    }

    /// Checks all pinned vertices exist and the occupied ones form an
    /// independent set.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        let ones: Vec<u32> = self
            .spins
            .iter()
            .filter(|&(_, &s)| s)
            .map(|(&v, _)| v)
            .collect();
        for (&v, _) in &self.spins {
            if v as usize >= graph.vertex_count() {
                return Err(Error::Validation(format!(
                    "pinned vertex {v} is outside 0..{}",
                    graph.vertex_count()
                )));
            }
        }
        if !graph.is_independent(&ones)? {
            return Err(Error::Validation(
                "pinned-occupied vertices are not independent".into(),
            ));
        }
        Ok(())
    }
}

/// Restricts an instance to the subgraph induced by `subset`.
///
/// Returns the sub-instance (vertices renumbered to `0..subset.len()` in
/// sorted order, fugacities carried over) and the translation table from new
/// ids back to original ids.
pub fn induced_subinstance(
    inst: &HardCoreInstance,
    subset: &[u32],
) -> Result<(HardCoreInstance, Vec<u32>)> {
    let (graph, table) = inst.graph().induced(subset)?;
    let weights = table.iter().map(|&v| inst.weight(v)).collect();
    Ok((HardCoreInstance::new(graph, weights)?, table))
}
