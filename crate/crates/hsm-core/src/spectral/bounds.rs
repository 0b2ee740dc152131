//! Numerical verification of the eigenvalue bounds tying the walks and
//! influence matrices together, plus the matrix facts they rest on.

use super::complex::{clique_influence_matrix, complex_representation, skeleton_walk_matrix};
use super::influence::InfluenceBoundCertificate;
use crate::dynamics::{
    spectral_gap, stationary_distribution, transition_matrix_exact, DynamicsKind,
};
use crate::error::{Error, Result};
use crate::hardcore::{
    induced_subinstance, validate_clique_cover, BlockCover, CliqueCover, Graph, HardCoreInstance,
};
use nalgebra::{Complex, DMatrix};
use serde::Serialize;

fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Validation(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.is_empty() {
        return Err(Error::Validation("eigenvalues of an empty matrix".into()));
    }
    Ok(a.clone().complex_eigenvalues().iter().copied().collect())
}

/// Largest real part over the (possibly complex) eigenvalues.
pub fn max_real_eigenvalue(a: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Result of sweeping every induced subgraph's element-influence
/// eigenvalue against the `(2 + C) C` cap.
#[derive(Debug, Clone, Serialize)]
pub struct SubsetEigenBound {
    pub c: f64,
    /// `(2 + C) C`.
    pub bound: f64,
    pub max_lambda1: f64,
    pub subsets_checked: u64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralBoundsReport {
    pub m: usize,
    pub z_max: f64,
    /// Second eigenvalue of the skeleton walk on the whole complex.
    pub lambda2: f64,
    pub lambda_min: f64,
    /// Largest real eigenvalue of the element influence matrix.
    pub psi_k_lambda1: f64,
    /// `psi_k_lambda1 / (m - 1)`.
    pub eigen_bound: f64,
    pub eigen_ok: bool,
    /// `1 - 1 / (12 z_max^2)`.
    pub path_bound: f64,
    pub path_ok: bool,
    pub subset_bound: Option<SubsetEigenBound>,
    pub ok: bool,
}

/// Largest base graph for the all-subsets eigenvalue sweep.
const SUBSET_SWEEP_CAP: usize = 10;

/// Checks the two caps on the skeleton walk's second eigenvalue — the
/// influence-eigenvalue bound `lambda1(psi) / (m - 1)` and the
/// weight bound `1 - 1/(12 z_max^2)` — and, when an influence-sum
/// certificate with constant `C` is supplied, additionally verifies
/// `lambda1 <= (2 + C) C` on every induced subgraph.
pub fn verify_spectral_bounds(
    inst: &HardCoreInstance,
    cover: &CliqueCover,
    certificate: Option<&InfluenceBoundCertificate>,
) -> Result<SpectralBoundsReport> {
    let m = cover.parts().len();
    if m < 2 {
        return Err(Error::Validation(format!(
            "the skeleton walk needs at least two cover parts, got {m}"
        )));
    }
    let report = validate_clique_cover(inst, cover);
    let z_max = match report.max_clique_z {
        Some(z) if report.valid() && report.disjoint => z,
        _ => {
            return Err(Error::Validation(format!(
                "the cover must be a disjoint partition into cliques: {:?}",
                report.problems
            )))
        }
    };
    let rep = complex_representation(inst, cover)?;
    let walk = skeleton_walk_matrix(&rep, &[])?;
    let gap = spectral_gap(walk.matrix(), walk.stationary())?;
    let infl = clique_influence_matrix(inst, cover)?;
    let psi_k_lambda1 = max_real_eigenvalue(infl.matrix())?;
    let eigen_bound = psi_k_lambda1 / (m as f64 - 1.0);
    let eigen_ok = gap.lambda2 <= eigen_bound + 1e-9;
    let path_bound = 1.0 - 1.0 / (12.0 * z_max * z_max);
    let path_ok = gap.lambda2 <= path_bound + 1e-9;

    let subset_bound = match certificate {
        None => None,
        Some(cert) => {
            let n = inst.vertex_count();
            if n > SUBSET_SWEEP_CAP {
                return Err(Error::CapExceeded {
                    what: "induced-subgraph eigenvalue sweep",
                    got: n as u128,
                    limit: SUBSET_SWEEP_CAP as u128,
                });
            }
            let c = cert.c;
            let bound = (2.0 + c) * c;
            let mut max_lambda1 = f64::NEG_INFINITY;
            let mut subsets_checked = 0u64;
            for mask in 1u32..1 << n {
                let subset: Vec<u32> =
                    (0..n as u32).filter(|v| mask >> v & 1 == 1).collect();
                let (sub, table) = induced_subinstance(inst, &subset)?;
                let mut old_to_new = vec![None; n];
                for (new, &old) in table.iter().enumerate() {
                    old_to_new[old as usize] = Some(new as u32);
                }
                let parts: Vec<Vec<u32>> = cover
                    .parts()
                    .iter()
                    .filter_map(|part| {
                        let kept: Vec<u32> =
                            part.iter().filter_map(|&v| old_to_new[v as usize]).collect();
                        (!kept.is_empty()).then_some(kept)
                    })
                    .collect();
                let sub_cover = CliqueCover::new(parts)?;
                let sub_infl = clique_influence_matrix(&sub, &sub_cover)?;
                max_lambda1 = max_lambda1.max(max_real_eigenvalue(sub_infl.matrix())?);
                subsets_checked += 1;
            }
            Some(SubsetEigenBound {
                c,
                bound,
                max_lambda1,
                subsets_checked,
                ok: max_lambda1 <= bound + 1e-9,
            })
        }
    };

    let ok = eigen_ok && path_ok && subset_bound.as_ref().map_or(true, |s| s.ok);
    Ok(SpectralBoundsReport {
        m,
        z_max,
        lambda2: gap.lambda2,
        lambda_min: gap.lambda_min,
        psi_k_lambda1,
        eigen_bound,
        eigen_ok,
        path_bound,
        path_ok,
        subset_bound,
        ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub lambda2_clique: f64,
    pub lambda2_block: f64,
    pub z_max: f64,
    /// `1 - (1 - lambda2_block) / (2 z_max)`.
    pub bound: f64,
    pub ok: bool,
}

/// The one-clique-at-a-time chain loses at most a `1 / (2 z_max)` factor
/// of the exact-resample chain's gap over the same parts:
/// `lambda2_clique <= 1 - (1 - lambda2_block) / (2 z_max)`.
pub fn verify_clique_block_comparison(
    inst: &HardCoreInstance,
    cover: &CliqueCover,
) -> Result<ComparisonReport> {
    let report = validate_clique_cover(inst, cover);
    let z_max = match report.max_clique_z {
        Some(z) if report.valid() => z,
        _ => {
            return Err(Error::Validation(format!(
                "the cover must be a valid clique cover: {:?}",
                report.problems
            )))
        }
    };
    let pi = stationary_distribution(inst)?;
    let clique = transition_matrix_exact(inst, &DynamicsKind::Clique(cover.clone()))?;
    let block_cover = BlockCover::new(cover.parts().to_vec())?;
    let block = transition_matrix_exact(inst, &DynamicsKind::Block(block_cover))?;
    let lambda2_clique = spectral_gap(clique.matrix(), &pi)?.lambda2;
    let lambda2_block = spectral_gap(block.matrix(), &pi)?.lambda2;
    let bound = 1.0 - (1.0 - lambda2_block) / (2.0 * z_max);
    Ok(ComparisonReport {
        lambda2_clique,
        lambda2_block,
        z_max,
        bound,
        ok: lambda2_clique <= bound + 1e-9,
    })
}

/// Turns an overlapping clique cover into a partition by removing from
/// each part every vertex already claimed by an earlier part. Emptied
/// parts are kept (so part indices survive) and their indices returned.
pub fn disjointify_cover(graph: &Graph, cover: &CliqueCover) -> Result<(CliqueCover, Vec<usize>)> {
    let dummy = HardCoreInstance::uniform(graph.clone(), 1.0)?;
    let report = validate_clique_cover(&dummy, cover);
    if !report.valid() {
        return Err(Error::Validation(format!(
            "the cover must be a clique cover before disjointification: {:?}",
            report.problems
        )));
    }
    let mut seen = vec![false; graph.vertex_count()];
    let mut parts = Vec::with_capacity(cover.parts().len());
    let mut emptied = Vec::new();
    for (i, part) in cover.parts().iter().enumerate() {
        let kept: Vec<u32> = part
            .iter()
            .copied()
            .filter(|&v| !std::mem::replace(&mut seen[v as usize], true))
            .collect();
        if kept.is_empty() && !part.is_empty() {
            emptied.push(i);
        }
        parts.push(kept);
    }
    Ok((CliqueCover::new(parts)?, emptied))
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusCheck {
    /// Whether `sum_j |a[i][j]| p[j] <= xi p[i]` holds for every row.
    pub row_condition_holds: bool,
    pub spectral_radius: f64,
    /// Whether the spectral radius is at most `xi`.
    pub radius_ok: bool,
}

/// Checks the row-domination bound: if a positive vector `p` satisfies
/// `sum_j |a[i][j]| p[j] <= xi p[i]` for every row `i`, then the spectral
/// radius of `a` is at most `xi`. Both sides are reported so callers can
/// assert the implication.
pub fn spectral_radius_bound_check(
    a: &DMatrix<f64>,
    p: &[f64],
    xi: f64,
) -> Result<RadiusCheck> {
    let n = a.nrows();
    if a.ncols() != n || p.len() != n {
        return Err(Error::Validation(format!(
            "matrix is {}x{} but the vector has {} entries",
            a.nrows(),
            a.ncols(),
            p.len()
        )));
    }
    if !xi.is_finite() {
        return Err(Error::Validation(format!("xi must be finite, got {xi}")));
    }
    if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Validation(
            "the dominating vector must be strictly positive and finite".into(),
        ));
    }
    let row_condition_holds = (0..n).all(|i| {
        let lhs: f64 = (0..n).map(|j| a[(i, j)].abs() * p[j]).sum();
        lhs <= xi * p[i] + 1e-12 * (1.0 + xi.abs() * p[i])
    });
    let radius = spectral_radius(a)?;
    Ok(RadiusCheck {
        row_condition_holds,
        spectral_radius: radius,
        radius_ok: radius <= xi + 1e-9,
    })
}
