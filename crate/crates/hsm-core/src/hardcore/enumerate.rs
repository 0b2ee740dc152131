//! Exact enumeration over independent sets.

use super::{Graph, HardCoreInstance, IndependentSet, PartialConfig};
use crate::error::{Error, Result};
use crate::util::KahanSum;
use std::collections::HashMap;

/// Largest vertex count exact enumeration accepts.
pub const ENUMERATION_CAP: usize = 24;

/// Streams every independent set of `graph` exactly once.
///
/// Order is depth-first over sorted candidate vertices, so the empty set
/// comes first and sets appear in lexicographic order of their sorted member
/// lists. The iterator never materializes the whole family.
#[derive(Debug)]
pub struct IndependentSetIter<'a> {
    graph: &'a Graph,
    current: Vec<u32>,
    // blocked[v] counts how many current members are v itself or a neighbor.
    blocked: Vec<u32>,
    candidate: usize,
    emitted_empty: bool,
    done: bool,
}

impl<'a> IndependentSetIter<'a> {
    fn new(graph: &'a Graph) -> Self {
        Self {
            graph,
            current: Vec::new(),
            blocked: vec![0; graph.vertex_count()],
            candidate: 0,
            emitted_empty: false,
            done: false,
        }
    }

    fn push(&mut self, v: u32) {
        self.current.push(v);
        self.blocked[v as usize] += 1;
        for &w in self.graph.neighbors(v) {
            self.blocked[w as usize] += 1;
        }
    }

    fn pop(&mut self) -> u32 {
        let v = self.current.pop().expect("pop on empty set");
        self.blocked[v as usize] -= 1;
        for &w in self.graph.neighbors(v) {
            self.blocked[w as usize] -= 1;
        }
        v
    }
}

impl Iterator for IndependentSetIter<'_> {
    type Item = IndependentSet;

    fn next(&mut self) -> Option<IndependentSet> {
        if self.done {
            return None;
        }
        if !self.emitted_empty {
            self.emitted_empty = true;
            return Some(IndependentSet::empty());
        }
        loop {
            let n = self.graph.vertex_count();
            let mut extended = None;
            for v in self.candidate..n {
                if self.blocked[v] == 0 {
                    extended = Some(v as u32);
                    break;
                }
            }
            match extended {
                Some(v) => {
                    self.push(v);
                    self.candidate = v as usize + 1;
                    return Some(IndependentSet::from_sorted(self.current.clone()));
                }
                None => {
                    if self.current.is_empty() {
                        self.done = true;
                        return None;
                    }
                    let v = self.pop();
                    self.candidate = v as usize + 1;
                }
            }
        }
    }
}

fn check_cap(graph: &Graph, what: &'static str) -> Result<()> {
    let n = graph.vertex_count();
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what,
            got: n as u128,
            limit: ENUMERATION_CAP as u128,
        });
    }
    Ok(())
}

/// Streams all independent sets, empty set first. Errors above the
/// enumeration cap of [`ENUMERATION_CAP`] vertices.
pub fn enumerate_independent_sets(graph: &Graph) -> Result<IndependentSetIter<'_>> {
    check_cap(graph, "independent-set enumeration")?;
    Ok(IndependentSetIter::new(graph))
}

/// Exact partition function by full enumeration with compensated summation.
///
/// Always at least 1 (the empty set). Errors above the enumeration cap or if
/// the sum overflows to infinity.
pub fn partition_function_bruteforce(inst: &HardCoreInstance) -> Result<f64> {
    check_cap(inst.graph(), "partition function")?;
    let mut z = KahanSum::new();
    for set in IndependentSetIter::new(inst.graph()) {
        z.add(set.weight_in(inst));
    }
    let z = z.value();
    if !z.is_finite() {
        return Err(Error::Overflow("partition function"));
    }
    Ok(z)
}

/// The exact Gibbs distribution over independent sets.
///
/// Set order matches [`enumerate_independent_sets`] (empty set at index 0).
#[derive(Debug, Clone)]
pub struct GibbsTable {
    sets: Vec<IndependentSet>,
    probs: Vec<f64>,
    z: f64,
    index: HashMap<IndependentSet, usize>,
}

impl GibbsTable {
    pub fn sets(&self) -> &[IndependentSet] {
        &self.sets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn index_of(&self, set: &IndependentSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn prob_of(&self, set: &IndependentSet) -> Option<f64> {
        self.index_of(set).map(|i| self.probs[i])
    }
}

/// Computes the full Gibbs distribution `mu(I) = weight(I) / Z` exactly.
pub fn gibbs_exact(inst: &HardCoreInstance) -> Result<GibbsTable> {
    check_cap(inst.graph(), "Gibbs distribution")?;
    let mut sets = Vec::new();
    let mut weights = Vec::new();
    let mut z = KahanSum::new();
    for set in IndependentSetIter::new(inst.graph()) {
        let w = set.weight_in(inst);
        z.add(w);
        sets.push(set);
        weights.push(w);
    }
    let z = z.value();
    if !z.is_finite() {
        return Err(Error::Overflow("Gibbs distribution"));
    }
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let index = sets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(GibbsTable {
        sets,
        probs,
        z,
        index,
    })
}

/// Per-vertex occupation probabilities under the Gibbs distribution
/// conditioned on `cond`.
///
/// Pinned vertices report their pinned value (0.0 or 1.0). Errors if the
/// condition is invalid or has zero probability.
pub fn marginals(inst: &HardCoreInstance, cond: &PartialConfig) -> Result<Vec<f64>> {
    check_cap(inst.graph(), "conditional marginals")?;
    cond.validate(inst.graph())?;
    let n = inst.vertex_count();
    let mut mass = KahanSum::new();
    let mut occupied = vec![KahanSum::new(); n];
    for set in IndependentSetIter::new(inst.graph()) {
        if !cond.consistent_with(&set) {
            continue;
        }
        let w = set.weight_in(inst);
        mass.add(w);
        for &v in set.vertices() {
            occupied[v as usize].add(w);
        }
    }
    let mass = mass.value();
    if mass <= 0.0 {
        return Err(Error::Validation(
            "condition is inconsistent with every independent set".into(),
        ));
    }
    Ok(occupied.iter().map(|o| o.value() / mass).collect())
}
