//! A weighted simplicial-complex view of the model under a disjoint clique
//! cover, with the walks it supports.
//!
//! Each cover part `i` becomes a partition holding one "open" element
//! (the clique is empty) and one "occupied" element per member vertex.
//! Every independent set picks exactly one element from each partition, so
//! the sets become the maximal faces of a weighted complex; subface
//! weights are sums of the maximal-face weights above them. The skeleton
//! walk, the down-up walk on maximal faces, and the clique influence
//! matrix are all computed from these weights.

use crate::dynamics::{spectral_gap, MATRIX_STATE_CAP};
use crate::error::{Error, Result};
use crate::hardcore::{
    gibbs_exact, validate_clique_cover, CliqueCover, HardCoreInstance, IndependentSet,
};
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// Largest number of maximal faces the representation will enumerate.
pub const COMPLEX_FACE_CAP: usize = 100_000;

/// Ground-set element of the complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Element {
    /// Partition `i`'s clique is empty.
    Open(usize),
    /// This vertex is occupied.
    Occupied(u32),
}

/// The complex: elements grouped into partitions, plus the maximal faces
/// (one per independent set) and their Gibbs weights.
#[derive(Debug, Clone)]
pub struct ComplexRep {
    elements: Vec<Element>,
    partition_of: Vec<usize>,
    /// Element ids per partition, the open element first.
    partitions: Vec<Vec<usize>>,
    /// Each face lists one element per partition, in partition order, so
    /// the ids are strictly increasing.
    faces: Vec<Vec<usize>>,
    weights: Vec<f64>,
    sets: Vec<IndependentSet>,
}

impl ComplexRep {
    pub fn m(&self) -> usize {
        self.partitions.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn partition_of(&self, element: usize) -> usize {
        self.partition_of[element]
    }

    pub fn partitions(&self) -> &[Vec<usize>] {
        &self.partitions
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sets(&self) -> &[IndependentSet] {
        &self.sets
    }

    /// Weight of a subface: the total weight of maximal faces above it.
    pub fn face_weight(&self, elems: &[usize]) -> f64 {
        self.faces
            .iter()
            .zip(&self.weights)
            .filter(|(f, _)| elems.iter().all(|e| f.binary_search(e).is_ok()))
            .map(|(_, w)| w)
            .sum()
    }

    /// The same complex with every maximal-face weight multiplied by `r`.
    /// The walks below are ratios of weights, so they must not change;
    /// this exists to let diagnostics verify that.
    pub fn scale_weights(&self, r: f64) -> Result<ComplexRep> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Validation(format!(
                "scale factor must be positive and finite, got {r}"
            )));
        }
        let mut scaled = self.clone();
        for w in &mut scaled.weights {
            *w *= r;
        }
        Ok(scaled)
    }
}

/// Builds the complex for `inst` under `cover`, which must be a valid
/// partition into cliques (disjoint and covering every vertex).
pub fn complex_representation(inst: &HardCoreInstance, cover: &CliqueCover) -> Result<ComplexRep> {
    let report = validate_clique_cover(inst, cover);
    if !report.valid() || !report.disjoint {
        return Err(Error::Validation(format!(
            "the cover must be a disjoint partition into cliques: {:?}",
            report.problems
        )));
    }
    let gibbs = gibbs_exact(inst)?;
    if gibbs.len() > COMPLEX_FACE_CAP {
        return Err(Error::CapExceeded {
            what: "complex faces",
            got: gibbs.len() as u128,
            limit: COMPLEX_FACE_CAP as u128,
        });
    }

    let m = cover.parts().len();
    let n = inst.vertex_count();
    let mut elements = Vec::new();
    let mut partition_of = Vec::new();
    let mut partitions = Vec::with_capacity(m);
    let mut open_of = Vec::with_capacity(m);
    let mut element_of_vertex = vec![usize::MAX; n];
    let mut part_of_vertex = vec![usize::MAX; n];
    for (i, part) in cover.parts().iter().enumerate() {
        let mut ids = Vec::with_capacity(part.len() + 1);
        open_of.push(elements.len());
        ids.push(elements.len());
        partition_of.push(i);
        elements.push(Element::Open(i));
        for &v in part {
            element_of_vertex[v as usize] = elements.len();
            part_of_vertex[v as usize] = i;
            ids.push(elements.len());
            partition_of.push(i);
            elements.push(Element::Occupied(v));
        }
        partitions.push(ids);
    }

    let mut faces = Vec::with_capacity(gibbs.len());
    for set in gibbs.sets() {
        let mut face = open_of.clone();
        for &v in set.vertices() {
            face[part_of_vertex[v as usize]] = element_of_vertex[v as usize];
        }
        faces.push(face);
    }

    Ok(ComplexRep {
        elements,
        partition_of,
        partitions,
        faces,
        weights: gibbs.probs().to_vec(),
        sets: gibbs.sets().to_vec(),
    })
}

/// One pass over the maximal faces above `tau`, accumulating the total
/// weight, each residual element's weight, and each residual pair's weight.
fn link_weights(rep: &ComplexRep, tau: &[usize]) -> (f64, Vec<f64>, DMatrix<f64>) {
    let e = rep.element_count();
    let mut total = 0.0;
    let mut singles = vec![0.0; e];
    let mut pairs = DMatrix::zeros(e, e);
    for (face, &w) in rep.faces.iter().zip(&rep.weights) {
        if !tau.iter().all(|t| face.binary_search(t).is_ok()) {
            continue;
        }
        total += w;
        let residual: Vec<usize> = face
            .iter()
            .copied()
            .filter(|x| !tau.contains(x))
            .collect();
        for (a, &x) in residual.iter().enumerate() {
            singles[x] += w;
            for &y in &residual[a + 1..] {
                pairs[(x, y)] += w;
                pairs[(y, x)] += w;
            }
        }
    }
    (total, singles, pairs)
}

/// The skeleton walk on the link of `tau`: from element `x`, pick a
/// uniformly random other partition and move to the element `y` there with
/// probability proportional to the weight of `tau + {x, y}`.
#[derive(Debug, Clone)]
pub struct SkeletonWalk {
    elements: Vec<usize>,
    matrix: DMatrix<f64>,
    stationary: Vec<f64>,
}

impl SkeletonWalk {
    /// Global element ids indexing the matrix.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }
}

/// Builds the skeleton walk on the link of `tau` (at most one element per
/// partition, at most `m - 2` of them, positive weight).
pub fn skeleton_walk_matrix(rep: &ComplexRep, tau: &[usize]) -> Result<SkeletonWalk> {
    let m = rep.m();
    for &t in tau {
        if t >= rep.element_count() {
            return Err(Error::Validation(format!(
                "face element {t} is outside 0..{}",
                rep.element_count()
            )));
        }
    }
    let mut seen = HashSet::new();
    for &t in tau {
        if !seen.insert(rep.partition_of[t]) {
            return Err(Error::Validation(
                "a face holds at most one element per partition".into(),
            ));
        }
    }
    if tau.len() + 2 > m {
        return Err(Error::Validation(format!(
            "the walk needs at least two free partitions: |face| = {} with m = {m}",
            tau.len()
        )));
    }
    let (total, singles, pairs) = link_weights(rep, tau);
    if total <= 0.0 {
        return Err(Error::Validation(
            "degenerate link: the face has zero weight".into(),
        ));
    }
    let k = (m - tau.len()) as f64;
    let elements: Vec<usize> = (0..rep.element_count())
        .filter(|&x| singles[x] > 0.0)
        .collect();
    let s = elements.len();
    let mut matrix = DMatrix::zeros(s, s);
    let mut stationary = vec![0.0; s];
    for (a, &x) in elements.iter().enumerate() {
        stationary[a] = singles[x] / (k * total);
        for (b, &y) in elements.iter().enumerate() {
            // The diagonal pair weight would be the element's own weight
            // (a face joined with itself deduplicates), not a self-loop,
            // so it is skipped explicitly.
            if a != b {
                matrix[(a, b)] = pairs[(x, y)] / ((k - 1.0) * singles[x]);
            }
        }
    }
    Ok(SkeletonWalk {
        elements,
        matrix,
        stationary,
    })
}

/// The down-up walk on maximal faces: drop the element of a uniformly
/// random partition, then extend back proportionally to weight. Rows and
/// columns index `rep.faces()`.
pub fn two_step_walk_matrix(rep: &ComplexRep) -> Result<DMatrix<f64>> {
    let nfaces = rep.faces.len();
    if nfaces > MATRIX_STATE_CAP {
        return Err(Error::CapExceeded {
            what: "down-up walk state space",
            got: nfaces as u128,
            limit: MATRIX_STATE_CAP as u128,
        });
    }
    let m = rep.m();
    let mut p = DMatrix::zeros(nfaces, nfaces);
    for i in 0..m {
        let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (f, face) in rep.faces.iter().enumerate() {
            let mut key = face.clone();
            key.remove(i);
            groups.entry(key).or_default().push(f);
        }
        for group in groups.values() {
            let total: f64 = group.iter().map(|&f| rep.weights[f]).sum();
            for &x in group {
                for &y in group {
                    p[(x, y)] += rep.weights[y] / (m as f64 * total);
                }
            }
        }
    }
    Ok(p)
}

/// Influence between ground-set elements:
/// `psi(x, y) = w({x, y}) / w({x}) - w({y})` across partitions, 0 within.
#[derive(Debug, Clone)]
pub struct CliqueInfluenceMatrix {
    elements: Vec<Element>,
    partition_of: Vec<usize>,
    element_weights: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl CliqueInfluenceMatrix {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn partition_of(&self) -> &[usize] {
        &self.partition_of
    }

    /// `w({x})` per element: the chance the walk's stationary set induces
    /// that element.
    pub fn element_weights(&self) -> &[f64] {
        &self.element_weights
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Computes the element influence matrix of the complex.
pub fn clique_influence_of(rep: &ComplexRep) -> Result<CliqueInfluenceMatrix> {
    let (_, singles, pairs) = link_weights(rep, &[]);
    let e = rep.element_count();
    for (x, &w) in singles.iter().enumerate() {
        if w <= 0.0 {
            return Err(Error::Validation(format!(
                "zero-probability ground-set event at element {x}"
            )));
        }
    }
    let mut matrix = DMatrix::zeros(e, e);
    for x in 0..e {
        for y in 0..e {
            if rep.partition_of[x] != rep.partition_of[y] {
                matrix[(x, y)] = pairs[(x, y)] / singles[x] - singles[y];
            }
        }
    }
    Ok(CliqueInfluenceMatrix {
        elements: rep.elements.clone(),
        partition_of: rep.partition_of.clone(),
        element_weights: singles,
        matrix,
    })
}

/// Convenience wrapper: the element influence matrix of `inst` under a
/// disjoint clique cover.
pub fn clique_influence_matrix(
    inst: &HardCoreInstance,
    cover: &CliqueCover,
) -> Result<CliqueInfluenceMatrix> {
    clique_influence_of(&complex_representation(inst, cover)?)
}

/// Worst-case skeleton eigenvalues per link dimension, and the resulting
/// bound on the down-up walk.
#[derive(Debug, Clone, Serialize)]
pub struct LocalExpansionProfile {
    /// `alphas[k]`: the largest second eigenvalue of a skeleton walk on
    /// the link of a weight-positive face with `k` elements.
    pub alphas: Vec<f64>,
    pub two_step_lambda2: f64,
    /// `1 - (1/m) * prod over k of (1 - alphas[k])`.
    pub bound: f64,
    pub ok: bool,
}

/// Largest cover size for the expansion profile (the number of links grows
/// combinatorially).
const PROFILE_COVER_CAP: usize = 6;

/// Computes every link's skeleton eigenvalue, takes the worst per
/// dimension, and checks the product bound against the down-up walk.
pub fn local_expansion_profile(rep: &ComplexRep) -> Result<LocalExpansionProfile> {
    let m = rep.m();
    if m < 2 {
        return Err(Error::Validation(format!(
            "the expansion profile needs at least two partitions, got {m}"
        )));
    }
    if m > PROFILE_COVER_CAP {
        return Err(Error::CapExceeded {
            what: "expansion-profile cover",
            got: m as u128,
            limit: PROFILE_COVER_CAP as u128,
        });
    }
    let mut alphas = Vec::with_capacity(m - 1);
    for k in 0..=m - 2 {
        // Distinct weight-positive faces with k elements: the k-subsets of
        // the maximal faces.
        let mut links: HashSet<Vec<usize>> = HashSet::new();
        for face in &rep.faces {
            subsets_of_size(face, k, &mut links);
        }
        let mut alpha = f64::NEG_INFINITY;
        for tau in &links {
            let walk = skeleton_walk_matrix(rep, tau)?;
            let gap = spectral_gap(walk.matrix(), walk.stationary())?;
            alpha = alpha.max(gap.lambda2);
        }
        alphas.push(alpha);
    }
    let p2 = two_step_walk_matrix(rep)?;
    let two_step_lambda2 = spectral_gap(&p2, rep.weights())?.lambda2;
    let product: f64 = alphas.iter().map(|a| 1.0 - a).product();
    let bound = 1.0 - product / m as f64;
    Ok(LocalExpansionProfile {
        alphas,
        two_step_lambda2,
        bound,
        ok: two_step_lambda2 <= bound + 1e-9,
    })
}

fn subsets_of_size(face: &[usize], k: usize, out: &mut HashSet<Vec<usize>>) {
    let mut current = Vec::with_capacity(k);
    fn rec(face: &[usize], k: usize, from: usize, current: &mut Vec<usize>, out: &mut HashSet<Vec<usize>>) {
        if current.len() == k {
            out.insert(current.clone());
            return;
        }
        for i in from..face.len() {
            current.push(face[i]);
            rec(face, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(face, k, 0, &mut current, out);
}
