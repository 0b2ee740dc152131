//! Undirected simple graphs over dense vertex indices.

use crate::error::{Error, Result};

/// An undirected simple graph on vertices `0..vertex_count()`.
///
/// Adjacency lists are strictly sorted and symmetric. Construction rejects
/// self-loops, duplicate edges, and out-of-range endpoints, so every `Graph`
/// value satisfies those invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an edge list.
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop at vertex {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "duplicate edge incident to vertex {v}"
                )));
            }
        }
        Ok(Self { n, adj })
    }

    /// Builds a graph from adjacency lists, validating symmetry.
    pub fn from_adjacency(adj: Vec<Vec<u32>>) -> Result<Self> {
        let n = adj.len();
        let mut edges = Vec::new();
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                if (v as usize) >= n {
                    return Err(Error::Validation(format!(
                        "adjacency list of {u} mentions out-of-range vertex {v}"
                    )));
                }
                if !adj[v as usize].contains(&(u as u32)) {
                    return Err(Error::Validation(format!(
                        "asymmetric adjacency: {u} lists {v} but not vice versa"
                    )));
                }
                if (u as u32) < v {
                    edges.push((u as u32, v));
                }
            }
        }
        Self::new(n, &edges)
    }

    /// Graph with `n` vertices and no edges.
    pub fn edgeless(n: usize) -> Self {
        Self {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    /// Path graph 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    /// Cycle graph on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Validation(format!(
                "cycle needs at least 3 vertices, got {n}"
            )));
        }
        let mut edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
        edges.push((0, n as u32 - 1));
        Self::new(n, &edges)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges).expect("complete-graph edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn is_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as `(u, v)` with `u < v`, in sorted order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// `v` together with its neighbors, sorted.
    pub fn closed_neighborhood(&self, v: u32) -> Vec<u32> {
        let mut out = self.adj[v as usize].clone();
        let pos = out.partition_point(|&w| w < v);
        out.insert(pos, v);
        out
    }

    /// Checks that `set` contains no two adjacent vertices.
    ///
    /// Errors on out-of-range or repeated vertices rather than guessing.
    pub fn is_independent(&self, set: &[u32]) -> Result<bool> {
        let mut member = vec![false; self.n];
        for &v in set {
            if v as usize >= self.n {
                return Err(Error::Validation(format!(
                    "vertex {v} is outside 0..{}",
                    self.n
                )));
            }
            if member[v as usize] {
                return Err(Error::Validation(format!("vertex {v} repeated in set")));
            }
            member[v as usize] = true;
        }
        for &v in set {
            if self.adj[v as usize].iter().any(|&w| member[w as usize]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Subgraph induced by `subset` (sorted, deduplicated ids), with vertices
    /// renumbered to `0..subset.len()` in sorted order. Returns the graph and
    /// the translation table mapping new ids to original ids.
    pub fn induced(&self, subset: &[u32]) -> Result<(Graph, Vec<u32>)> {
        let mut table: Vec<u32> = subset.to_vec();
        table.sort_unstable();
        table.dedup();
        if table.len() != subset.len() {
            return Err(Error::Validation("subset contains duplicates".into()));
        }
        if let Some(&v) = table.last() {
            if v as usize >= self.n {
                return Err(Error::Validation(format!(
                    "vertex {v} is outside 0..{}",
                    self.n
                )));
            }
        }
        let mut new_id = vec![u32::MAX; self.n];
        for (i, &v) in table.iter().enumerate() {
            new_id[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for &v in &table {
            for &w in &self.adj[v as usize] {
                if v < w && new_id[w as usize] != u32::MAX {
                    edges.push((new_id[v as usize], new_id[w as usize]));
                }
            }
        }
        Ok((Graph::new(table.len(), &edges)?, table))
    }

    /// True if the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// True if the graph is a tree: connected with exactly n-1 edges.
    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edge_count() == self.n - 1 && self.is_connected()
    }
}
