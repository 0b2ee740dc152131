//! Trees of self-avoiding walks and the influence identities they carry.
//!
//! From a root `r`, the tree has one node per self-avoiding walk starting
//! at `r` (walks never step straight back to their predecessor). A walk
//! that revisits an earlier vertex closes a cycle and becomes a leaf whose
//! spin is fixed by a total-order rule; all other nodes are free and carry
//! their origin vertex's fugacity. The influence of the root on a vertex
//! of the original graph equals the sum of the root's influences on that
//! vertex's free copies in the tree.

use super::cdc::{check_strict_cdc, CdcCheck};
use super::influence::pairwise_influence;
use crate::error::{Error, Result};
use crate::hardcore::{Graph, HardCoreInstance, PartialConfig, ENUMERATION_CAP};
use serde::Serialize;

/// Largest number of tree nodes the construction will produce.
pub const SAW_TREE_CAP: usize = 50_000;

/// Largest base-graph size (the tree is exponential in it).
const SAW_BASE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeStatus {
    Free,
    /// Cycle-closing copy pinned occupied.
    FixedOne,
    /// Cycle-closing copy pinned unoccupied.
    FixedZero,
}

#[derive(Debug, Clone, Serialize)]
pub struct SawNode {
    /// Vertex of the base graph this node copies.
    pub origin: u32,
    pub parent: Option<usize>,
    pub depth: usize,
    pub status: NodeStatus,
}

/// The walk tree: nodes in depth-first preorder, node 0 the root.
#[derive(Debug, Clone)]
pub struct SawTree {
    nodes: Vec<SawNode>,
    children: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl SawTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SawNode] {
        &self.nodes
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn root_vertex(&self) -> u32 {
        self.nodes[0].origin
    }

    /// Free copies of a base vertex, in preorder.
    pub fn free_copies_of(&self, v: u32) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.origin == v && n.status == NodeStatus::Free)
            .map(|(i, _)| i)
            .collect()
    }

    /// The tree as a hard-core instance over all nodes (copies inherit
    /// their origin's fugacity) plus the pins for the fixed copies.
    pub fn as_pinned_instance(&self) -> Result<(HardCoreInstance, PartialConfig)> {
        let edges: Vec<(u32, u32)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.parent.map(|p| (p as u32, i as u32)))
            .collect();
        let graph = Graph::new(self.nodes.len(), &edges)?;
        let mut pins = PartialConfig::empty();
        for (i, n) in self.nodes.iter().enumerate() {
            match n.status {
                NodeStatus::Free => {}
                NodeStatus::FixedOne => pins = pins.set(i as u32, true),
                NodeStatus::FixedZero => pins = pins.set(i as u32, false),
            }
        }
        Ok((HardCoreInstance::new(graph, self.weights.clone())?, pins))
    }

    /// The tree with the pins resolved by surgery instead: occupied copies
    /// delete themselves and their neighbors, unoccupied copies delete
    /// themselves. Returns the instance over the kept nodes and the map
    /// from tree node to new id.
    pub fn surgered_instance(&self) -> Result<(HardCoreInstance, Vec<Option<u32>>)> {
        let mut keep = vec![true; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            match n.status {
                NodeStatus::Free => {}
                NodeStatus::FixedZero => keep[i] = false,
                NodeStatus::FixedOne => {
                    keep[i] = false;
                    // A fixed copy is a leaf: its only neighbor is its parent.
                    keep[n.parent.expect("fixed copies are never the root")] = false;
                }
            }
        }
        let mut map = vec![None; self.nodes.len()];
        let mut weights = Vec::new();
        for (i, k) in keep.iter().enumerate() {
            if *k {
                map[i] = Some(weights.len() as u32);
                weights.push(self.weights[i]);
            }
        }
        let edges: Vec<(u32, u32)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match (map[i], n.parent.and_then(|p| map[p])) {
                (Some(a), Some(b)) => Some((b, a)),
                _ => None,
            })
            .collect();
        let graph = Graph::new(weights.len(), &edges)?;
        Ok((HardCoreInstance::new(graph, weights)?, map))
    }

    /// The root's influence on every node, computed by the tree recursion
    /// (no enumeration, so it scales to the full cap).
    ///
    /// Up-pass: `p(u) = x / (1 + x)` with
    /// `x = lambda_u * prod over children (1 - p(child))` is the chance `u`
    /// is occupied given its parent is not (pinned copies contribute 0 or
    /// 1). Down-pass tracks each node's conditional occupation probability
    /// given the root's spin; the influence is the difference.
    pub fn influence_row(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut p = vec![0.0; n];
        for i in (0..n).rev() {
            p[i] = match self.nodes[i].status {
                NodeStatus::FixedOne => 1.0,
                NodeStatus::FixedZero => 0.0,
                NodeStatus::Free => {
                    let x: f64 = self.weights[i]
                        * self.children[i].iter().map(|&c| 1.0 - p[c]).product::<f64>();
                    x / (1.0 + x)
                }
            };
        }
        // (given root occupied, given root unoccupied) per node.
        let mut occ = vec![(0.0, 0.0); n];
        occ[0] = (1.0, 0.0);
        let mut row = vec![0.0; n];
        for i in 1..n {
            match self.nodes[i].status {
                NodeStatus::FixedOne => occ[i] = (1.0, 1.0),
                NodeStatus::FixedZero => occ[i] = (0.0, 0.0),
                NodeStatus::Free => {
                    let (pa, pb) = occ[self.nodes[i].parent.expect("non-root")];
                    occ[i] = ((1.0 - pa) * p[i], (1.0 - pb) * p[i]);
                    row[i] = occ[i].0 - occ[i].1;
                }
            }
        }
        row
    }
}

/// Builds the walk tree of `inst` from `root`.
pub fn saw_tree(inst: &HardCoreInstance, root: u32) -> Result<SawTree> {
    let n = inst.vertex_count();
    if n > SAW_BASE_CAP {
        return Err(Error::CapExceeded {
            what: "walk-tree base graph",
            got: n as u128,
            limit: SAW_BASE_CAP as u128,
        });
    }
    if root as usize >= n {
        return Err(Error::Validation(format!(
            "root {root} is outside 0..{n}"
        )));
    }
    let mut tree = SawTree {
        nodes: vec![SawNode {
            origin: root,
            parent: None,
            depth: 0,
            status: NodeStatus::Free,
        }],
        children: vec![Vec::new()],
        weights: vec![inst.weight(root)],
    };
    let mut path = vec![root];
    let mut pos_of: Vec<Option<usize>> = vec![None; n];
    pos_of[root as usize] = Some(0);
    extend(inst, &mut tree, 0, &mut path, &mut pos_of)?;
    Ok(tree)
}

fn extend(
    inst: &HardCoreInstance,
    tree: &mut SawTree,
    at: usize,
    path: &mut Vec<u32>,
    pos_of: &mut Vec<Option<usize>>,
) -> Result<()> {
    let u = *path.last().expect("path tracks the walk");
    let depth = tree.nodes[at].depth + 1;
    for &x in inst.graph().neighbors(u) {
        // Never step straight back to the predecessor.
        if path.len() >= 2 && x == path[path.len() - 2] {
            continue;
        }
        if tree.nodes.len() >= SAW_TREE_CAP {
            return Err(Error::CapExceeded {
                what: "walk tree",
                got: tree.nodes.len() as u128 + 1,
                limit: SAW_TREE_CAP as u128,
            });
        }
        if let Some(j) = pos_of[x as usize] {
            // The walk closes a cycle: a fixed leaf. It is pinned occupied
            // exactly when the revisited vertex's successor along the walk
            // has a larger index than the walk's second-to-last vertex.
            let status = if path[j + 1] > u {
                NodeStatus::FixedOne
            } else {
                NodeStatus::FixedZero
            };
            let id = tree.nodes.len();
            tree.nodes.push(SawNode {
                origin: x,
                parent: Some(at),
                depth,
                status,
            });
            tree.children.push(Vec::new());
            tree.children[at].push(id);
            tree.weights.push(inst.weight(x));
        } else {
            let id = tree.nodes.len();
            tree.nodes.push(SawNode {
                origin: x,
                parent: Some(at),
                depth,
                status: NodeStatus::Free,
            });
            tree.children.push(Vec::new());
            tree.children[at].push(id);
            tree.weights.push(inst.weight(x));
            pos_of[x as usize] = Some(path.len());
            path.push(x);
            extend(inst, tree, id, path, pos_of)?;
            path.pop();
            pos_of[x as usize] = None;
        }
    }
    Ok(())
}

/// Per-vertex comparison of the graph influence against the walk-tree sum.
#[derive(Debug, Clone, Serialize)]
pub struct SawVertexCheck {
    pub vertex: u32,
    pub graph_influence: f64,
    pub tree_sum: f64,
    pub free_copies: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SawReport {
    pub root: u32,
    pub tree_nodes: usize,
    pub per_vertex: Vec<SawVertexCheck>,
    /// Largest `|graph influence - tree sum|` over vertices.
    pub max_discrepancy: f64,
    /// Whether the tree influences were additionally recomputed by
    /// enumeration (pinned and surgered routes) and compared.
    pub routes_cross_checked: bool,
    /// Largest disagreement between the recursion and the enumeration
    /// routes (0 when not cross-checked).
    pub max_route_discrepancy: f64,
}

/// Verifies that the root's influence on each vertex equals the sum of its
/// influences on that vertex's free copies in the walk tree.
///
/// The tree side uses the tree recursion; on trees small enough to
/// enumerate it is cross-checked against two independent routes (pinning
/// the fixed copies, and resolving them by surgery).
pub fn verify_saw_influence(inst: &HardCoreInstance, root: u32) -> Result<SawReport> {
    let tree = saw_tree(inst, root)?;
    let bp = tree.influence_row();
    let psi_g = pairwise_influence(inst, &PartialConfig::empty())?;
    let mut per_vertex = Vec::new();
    let mut max_discrepancy = 0.0f64;
    for v in 0..inst.vertex_count() as u32 {
        let copies = tree.free_copies_of(v);
        let tree_sum: f64 = copies.iter().map(|&c| bp[c]).sum();
        let graph_influence = psi_g
            .entry(root, v)
            .expect("unconditioned rows are always defined");
        max_discrepancy = max_discrepancy.max((graph_influence - tree_sum).abs());
        per_vertex.push(SawVertexCheck {
            vertex: v,
            graph_influence,
            tree_sum,
            free_copies: copies.len(),
        });
    }

    let mut max_route_discrepancy = 0.0f64;
    let routes_cross_checked = tree.len() <= ENUMERATION_CAP;
    if routes_cross_checked {
        let (tinst, pins) = tree.as_pinned_instance()?;
        let pinned = pairwise_influence(&tinst, &pins)?;
        let (sinst, map) = tree.surgered_instance()?;
        let surgered = pairwise_influence(&sinst, &PartialConfig::empty())?;
        let new_root = map[0].expect("the root survives surgery");
        for (i, node) in tree.nodes().iter().enumerate() {
            if node.status != NodeStatus::Free {
                continue;
            }
            let via_pins = pinned
                .entry(0, i as u32)
                .expect("the root row is defined under leaf pins");
            max_route_discrepancy = max_route_discrepancy.max((via_pins - bp[i]).abs());
            // Free nodes removed by surgery are exactly those forced
            // unoccupied; their influence must vanish.
            let via_surgery = match map[i] {
                Some(ni) => surgered
                    .entry(new_root, ni)
                    .expect("unconditioned rows are always defined"),
                None => 0.0,
            };
            max_route_discrepancy = max_route_discrepancy.max((via_surgery - bp[i]).abs());
        }
    }

    Ok(SawReport {
        root,
        tree_nodes: tree.len(),
        per_vertex,
        max_discrepancy,
        routes_cross_checked,
        max_route_discrepancy,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativityReport {
    pub triples_checked: u64,
    pub max_error: f64,
    pub ok: bool,
}

/// On a tree, the influence between two non-adjacent vertices factors
/// through every interior vertex of the path joining them:
/// `psi(v, w) = psi(v, u) psi(u, w)`. Verified to 1e-12 for all such
/// triples.
pub fn verify_tree_multiplicativity(inst: &HardCoreInstance) -> Result<MultiplicativityReport> {
    let graph = inst.graph();
    if !graph.is_tree() {
        return Err(Error::Validation("the graph is not a tree".into()));
    }
    let psi = pairwise_influence(inst, &PartialConfig::empty())?;
    let matrix = psi.fully_defined()?;
    let n = graph.vertex_count();
    let mut triples = 0u64;
    let mut max_error = 0.0f64;
    for v in 0..n as u32 {
        // BFS parents give the unique path from v to anything.
        let mut parent = vec![u32::MAX; n];
        parent[v as usize] = v;
        let mut queue = std::collections::VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &x in graph.neighbors(u) {
                if parent[x as usize] == u32::MAX {
                    parent[x as usize] = u;
                    queue.push_back(x);
                }
            }
        }
        for w in v + 1..n as u32 {
            if graph.is_edge(v, w) {
                continue;
            }
            let mut u = parent[w as usize];
            while u != v {
                let lhs = matrix[(v as usize, w as usize)];
                let rhs = matrix[(v as usize, u as usize)] * matrix[(u as usize, w as usize)];
                max_error = max_error.max((lhs - rhs).abs());
                triples += 1;
                u = parent[u as usize];
            }
        }
    }
    Ok(MultiplicativityReport {
        triples_checked: triples,
        max_error,
        ok: max_error <= 1e-12,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub alpha: f64,
    /// `sum over depth-k nodes of |influence| * mu(origin)`, k = 1, 2, ...
    pub layer_sums: Vec<f64>,
    /// `(1 - alpha)^k * mu(root)`.
    pub layer_bounds: Vec<f64>,
    pub ok: bool,
}

/// Checks geometric decay of influence down the walk tree: when the
/// contraction condition holds with margin `alpha`, the mu-weighted
/// influence of the root on depth-k nodes is at most `(1-alpha)^k mu(root)`.
pub fn influence_decay_check(
    inst: &HardCoreInstance,
    root: u32,
    mu: &[f64],
    alpha: f64,
) -> Result<DecayReport> {
    match check_strict_cdc(inst, mu, alpha)? {
        CdcCheck::Certificate(_) => {}
        CdcCheck::Counterexample(cx) => {
            return Err(Error::Validation(format!(
                "contraction precondition fails at vertex {}: {} > {}",
                cx.vertex, cx.lhs, cx.rhs
            )));
        }
    }
    let tree = saw_tree(inst, root)?;
    let row = tree.influence_row();
    let max_depth = tree.nodes().iter().map(|n| n.depth).max().unwrap_or(0);
    let mut layer_sums = vec![0.0; max_depth];
    for (i, node) in tree.nodes().iter().enumerate() {
        if node.depth > 0 {
            layer_sums[node.depth - 1] += row[i].abs() * mu[node.origin as usize];
        }
    }
    let layer_bounds: Vec<f64> = (1..=max_depth)
        .map(|k| (1.0 - alpha).powi(k as i32) * mu[root as usize])
        .collect();
    let ok = layer_sums
        .iter()
        .zip(&layer_bounds)
        .all(|(s, b)| *s <= b + 1e-12);
    Ok(DecayReport {
        alpha,
        layer_sums,
        layer_bounds,
        ok,
    })
}
