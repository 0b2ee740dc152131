//! Clique and block covers of a graph, and the tree uniqueness threshold.

use super::{Graph, HardCoreInstance};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An ordered list of cliques intended to cover the vertex set.
///
/// Parts may overlap and may be empty (empty parts arise when an overlapping
/// cover is made disjoint); validity is checked by [`validate_clique_cover`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCover {
    cliques: Vec<Vec<u32>>,
}

impl CliqueCover {
    /// Wraps the parts, sorting each one. Duplicate ids inside a part are
    /// rejected; everything else is deferred to validation.
    pub fn new(parts: Vec<Vec<u32>>) -> Result<Self> {
        let mut cliques = parts;
        for part in &mut cliques {
            part.sort_unstable();
            if part.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation("repeated vertex inside a part".into()));
            }
        }
        Ok(Self { cliques })
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

/// Cover of all vertices by singleton cliques; single-site dynamics on a
/// graph is exactly clique dynamics with this cover.
pub fn singleton_cover(n: usize) -> CliqueCover {
    CliqueCover {
        cliques: (0..n as u32).map(|v| vec![v]).collect(),
    }
}

/// An ordered list of vertex blocks (no clique requirement) covering V.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCover {
    blocks: Vec<Vec<u32>>,
}

impl BlockCover {
    pub fn new(parts: Vec<Vec<u32>>) -> Result<Self> {
        let mut blocks = parts;
        for part in &mut blocks {
            part.sort_unstable();
            if part.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation("repeated vertex inside a block".into()));
            }
        }
        Ok(Self { blocks })
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Everything [`validate_clique_cover`] discovered about a cover.
#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    /// Every vertex id in the cover exists in the graph.
    pub ids_in_range: bool,
    /// Every part induces a clique.
    pub all_parts_cliques: bool,
    /// The union of the parts is the whole vertex set.
    pub covers_all: bool,
    /// No vertex appears in two different parts.
    pub disjoint: bool,
    /// max over parts of the partition function of the induced sub-instance;
    /// for a clique K this is `1 + sum of fugacities in K`. Absent when ids
    /// are out of range.
    pub max_clique_z: Option<f64>,
    /// Human-readable descriptions of each violation found.
    pub problems: Vec<String>,
}

impl CoverReport {
    /// A cover is usable for clique dynamics when ids are in range, parts are
    /// cliques, and the union covers V. Disjointness is reported separately
    /// (only the simplicial-complex representation needs it).
    pub fn valid(&self) -> bool {
        self.ids_in_range && self.all_parts_cliques && self.covers_all
    }
}

/// Checks a clique cover against an instance and reports per-property
/// results plus the largest per-clique partition function.
pub fn validate_clique_cover(inst: &HardCoreInstance, cover: &CliqueCover) -> CoverReport {
    let graph = inst.graph();
    let n = graph.vertex_count();
    let mut problems = Vec::new();

    let mut ids_in_range = true;
    for (i, part) in cover.parts().iter().enumerate() {
        for &v in part {
            if v as usize >= n {
                ids_in_range = false;
                problems.push(format!("part {i} mentions out-of-range vertex {v}"));
            }
        }
    }

    let mut all_parts_cliques = true;
    let mut covers_all = true;
    let mut disjoint = true;
    let mut max_clique_z = None;

    if ids_in_range {
        let mut seen_in = vec![usize::MAX; n];
        for (i, part) in cover.parts().iter().enumerate() {
            for (a, &u) in part.iter().enumerate() {
                for &v in part.iter().skip(a + 1) {
                    if !graph.is_edge(u, v) {
                        all_parts_cliques = false;
                        problems.push(format!("part {i} is not a clique: {u} and {v} are not adjacent"));
                    }
                }
            }
            for &v in part {
                let prev = seen_in[v as usize];
                if prev != usize::MAX && prev != i {
                    disjoint = false;
                    problems.push(format!("vertex {v} appears in parts {prev} and {i}"));
                }
                seen_in[v as usize] = i;
            }
        }
        for (v, &part) in seen_in.iter().enumerate() {
            if part == usize::MAX {
                covers_all = false;
                problems.push(format!("vertex {v} is not covered"));
            }
        }
        let mut worst: f64 = 1.0;
        for part in cover.parts() {
            let z = 1.0 + part.iter().map(|&v| inst.weight(v)).sum::<f64>();
            worst = worst.max(z);
        }
        max_clique_z = Some(worst);
    }

    CoverReport {
        ids_in_range,
        all_parts_cliques,
        covers_all,
        disjoint,
        max_clique_z,
        problems,
    }
}

/// Checks that a block cover has in-range ids and covers every vertex.
pub fn validate_block_cover(graph: &Graph, cover: &BlockCover) -> Result<()> {
    let n = graph.vertex_count();
    let mut covered = vec![false; n];
    for (i, part) in cover.parts().iter().enumerate() {
        for &v in part {
            if v as usize >= n {
                return Err(Error::Validation(format!(
                    "block {i} mentions out-of-range vertex {v}"
                )));
            }
            covered[v as usize] = true;
        }
    }
    if let Some(v) = covered.iter().position(|&c| !c) {
        return Err(Error::Validation(format!("vertex {v} is not covered")));
    }
    Ok(())
}

/// Uniqueness threshold of the infinite `delta`-regular tree:
/// `(delta-1)^(delta-1) / (delta-2)^delta`, defined for `delta >= 3`.
///
/// Evaluated directly for moderate degrees and in log space beyond, where
/// the numerator alone would overflow.
pub fn tree_threshold(delta: u32) -> Result<f64> {
    if delta < 3 {
        return Err(Error::Validation(format!(
            "tree threshold requires degree >= 3, got {delta}"
        )));
    }
    let d = delta as f64;
    if delta <= 100 {
        Ok((d - 1.0).powi(delta as i32 - 1) / (d - 2.0).powi(delta as i32))
    } else {
        // Rearranged so the two log terms never cancel:
        // (d-1) ln(1 + 1/(d-2)) stays near 1 for large degrees.
        Ok(((d - 1.0) * (1.0 / (d - 2.0)).ln_1p() - (d - 2.0).ln()).exp())
    }
}
