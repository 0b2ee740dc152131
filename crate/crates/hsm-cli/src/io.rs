//! File formats and output plumbing.
//!
//! Explicit hard-core instances are JSON objects with either an edge list
//! (`{"vertices": 3, "edges": [[0,1],[1,2]], "lambda": 1.0}`) or a 0/1
//! adjacency matrix (`{"adjacency": [[0,1],[1,0]], "lambda": [0.5, 2.0]}`).
//! `lambda` is one number for uniform fugacity or one number per vertex.
//! Hard-sphere instances are `{"d": 1, "ell": 4.0, "lambda": 1.0}` with an
//! optional `"rho"` used by grid-backed covers.

use hsm_core::error::{Error, Result};
use hsm_core::hardcore::{singleton_cover, CliqueCover, Graph, HardCoreInstance};
use hsm_core::hs::HardSphereInstance;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Deserialize)]
#[serde(untagged)]
enum LambdaSpec {
    Uniform(f64),
    PerVertex(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    vertices: Option<usize>,
    edges: Option<Vec<(u32, u32)>>,
    adjacency: Option<Vec<Vec<u8>>>,
    lambda: LambdaSpec,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads an explicit hard-core instance from JSON.
pub fn read_instance(path: &Path) -> Result<HardCoreInstance> {
    let file: InstanceFile = read_json(path)?;
    let (n, edges) = match (file.vertices, file.adjacency) {
        (Some(_), Some(_)) => {
            return Err(Error::Validation(
                "give either vertices/edges or an adjacency matrix, not both".into(),
            ))
        }
        (Some(n), None) => (n, file.edges.unwrap_or_default()),
        (None, Some(adj)) => {
            if file.edges.is_some() {
                return Err(Error::Validation(
                    "an adjacency matrix already fixes the edges".into(),
                ));
            }
            (adj.len(), edges_of_adjacency(&adj)?)
        }
        (None, None) => {
            return Err(Error::Validation(
                "an instance needs either a vertex count or an adjacency matrix".into(),
            ))
        }
    };
    let weights = match file.lambda {
        LambdaSpec::Uniform(l) => vec![l; n],
        LambdaSpec::PerVertex(ws) => ws,
    };
    HardCoreInstance::new(Graph::new(n, &edges)?, weights)
}

fn edges_of_adjacency(adj: &[Vec<u8>]) -> Result<Vec<(u32, u32)>> {
    let n = adj.len();
    let mut edges = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Validation(format!(
                "adjacency matrix is not square: row {i} has {} entries for {n} vertices",
                row.len()
            )));
        }
        for (j, &cell) in row.iter().enumerate() {
            if cell > 1 {
                return Err(Error::Validation(format!(
                    "adjacency entries must be 0 or 1, got {cell} at ({i}, {j})"
                )));
            }
            if i == j && cell != 0 {
                return Err(Error::Validation(format!(
                    "adjacency matrix has a self-loop at vertex {i}"
                )));
            }
            if cell != adj[j][i] {
                return Err(Error::Validation(format!(
                    "asymmetric adjacency at ({i}, {j}): entry {cell} vs {}",
                    adj[j][i]
                )));
            }
            if i < j && cell == 1 {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(edges)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsFile {
    pub d: u32,
    pub ell: f64,
    pub lambda: f64,
    /// Grid resolution; only grid-backed covers need it.
    pub rho: Option<f64>,
}

pub fn read_hs_instance(path: &Path) -> Result<(HardSphereInstance, Option<f64>)> {
    let file: HsFile = read_json(path)?;
    Ok((
        HardSphereInstance::new(file.d, file.ell, file.lambda)?,
        file.rho,
    ))
}

/// How the estimator's clique cover is specified on the command line.
pub enum CoverSpec {
    /// One singleton clique per vertex.
    Singletons,
    /// The grid discretization's cell cover (hard-sphere instances only).
    Cells,
    /// Explicit parts, inline (`[[0,1],[2]]`) or from a file (`@cover.json`).
    Parts(Vec<Vec<u32>>),
}

pub fn parse_cover_spec(spec: &str) -> Result<CoverSpec> {
    match spec {
        "singletons" => Ok(CoverSpec::Singletons),
        "cells" => Ok(CoverSpec::Cells),
        _ => {
            let text = if let Some(path) = spec.strip_prefix('@') {
                std::fs::read_to_string(PathBuf::from(path))?
            } else {
                spec.to_string()
            };
            let parts: Vec<Vec<u32>> = serde_json::from_str(&text).map_err(|e| {
                Error::Validation(format!(
                    "cover spec must be \"singletons\", \"cells\", a JSON list of \
                     vertex lists, or @file with one: {e}"
                ))
            })?;
            Ok(CoverSpec::Parts(parts))
        }
    }
}

pub fn cover_for_instance(spec: &CoverSpec, n: usize) -> Result<CliqueCover> {
    match spec {
        CoverSpec::Singletons => Ok(singleton_cover(n)),
        CoverSpec::Parts(parts) => CliqueCover::new(parts.clone()),
        CoverSpec::Cells => Err(Error::Validation(
            "the cells cover needs a hard-sphere instance with a rho field".into(),
        )),
    }
}

/// Writes the report to `--out` or stdout, always newline-terminated.
pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}
