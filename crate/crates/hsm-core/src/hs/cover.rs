//! Axis-aligned cell covers of the grid whose cells are cliques.

use super::dd::dd_from_u128;
use super::{Discretization, GridPoint};
use crate::error::{Error, Result};
use crate::hardcore::CliqueCover;

/// A partition of the grid into axis-aligned cells of side at most `a`,
/// chosen so that any two points in one cell conflict: each cell is a
/// clique of the grid graph, and at most one sphere center can occupy it.
///
/// Cells are cubes of side `a` except at the high end of each axis, where
/// the last cell is trimmed to the grid boundary. Cell ids are row-major
/// over the cell lattice (last axis fastest).
#[derive(Debug, Clone)]
pub struct CellCover {
    d: usize,
    side: i64,
    a: i64,
    per_axis: i64,
    m: usize,
}

impl CellCover {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Cell side length.
    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn cells_per_axis(&self) -> i64 {
        self.per_axis
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Id of the cell containing `p`.
    pub fn cell_of(&self, p: &[i64]) -> usize {
        p.iter()
            .fold(0i64, |acc, &x| acc * self.per_axis + x / self.a) as usize
    }

    /// Low corner of a cell.
    pub fn cell_origin(&self, id: usize) -> GridPoint {
        let mut idx = id as i64;
        let mut origin = vec![0i64; self.d];
        for axis in (0..self.d).rev() {
            origin[axis] = (idx % self.per_axis) * self.a;
            idx /= self.per_axis;
        }
        origin
    }

    /// Per-axis extents of a cell (`a`, except trimmed at the boundary).
    pub fn cell_extents(&self, id: usize) -> Vec<i64> {
        self.cell_origin(id)
            .iter()
            .map(|&o| self.a.min(self.side - o))
            .collect()
    }

    /// Number of grid points in a cell.
    pub fn cell_size(&self, id: usize) -> u64 {
        self.cell_extents(id).iter().map(|&e| e as u64).product()
    }

    /// The `rank`-th point of a cell, row-major within the cell.
    pub fn point_at(&self, id: usize, rank: u64) -> GridPoint {
        let origin = self.cell_origin(id);
        let extents = self.cell_extents(id);
        let mut rank = rank;
        let mut p = vec![0i64; self.d];
        for axis in (0..self.d).rev() {
            let e = extents[axis] as u64;
            p[axis] = origin[axis] + (rank % e) as i64;
            rank /= e;
        }
        p
    }

    /// Largest cell size (interior cells are cubes of side `a`).
    pub fn max_cell_size(&self) -> u64 {
        (self.a.min(self.side) as u64).pow(self.d as u32)
    }
}

/// Builds the cell cover with the largest admissible cell side
/// `a = floor(2 rho r / sqrt(d))`, the largest integer whose cells are
/// guaranteed cliques under the strict conflict rule.
///
/// Errors when the resolution is too coarse for `a >= 1`
/// (i.e. `2 rho r < sqrt(d)`).
pub fn cell_clique_cover(disc: &Discretization) -> Result<CellCover> {
    let d = disc.instance().d;
    let threshold = disc.threshold_sq();
    // Largest a with d * a^2 <= (2 rho r)^2, found from an f64 estimate and
    // confirmed against the extended-precision threshold.
    let mut a = (threshold.to_f64() / d as f64).sqrt().floor() as i64;
    let fits = |a: i64| -> bool {
        if a <= 0 {
            return false;
        }
        let q = (a as u128) * (a as u128) * d as u128;
        dd_from_u128(q).le(threshold)
    };
    while fits(a + 1) {
        a += 1;
    }
    while a > 0 && !fits(a) {
        a -= 1;
    }
    if a < 1 {
        return Err(Error::Validation(format!(
            "resolution too coarse for clique cells: 2*rho*r = {:.6} is below sqrt(d) = {:.6}",
            disc.conflict_radius(),
            (d as f64).sqrt()
        )));
    }
    let side = disc.side();
    let per_axis = (side + a - 1) / a;
    let m_u128 = (per_axis as u128).pow(d);
    if m_u128 > (1 << 31) {
        return Err(Error::CapExceeded {
            what: "cell cover",
            got: m_u128,
            limit: 1 << 31,
        });
    }
    Ok(CellCover {
        d: d as usize,
        side,
        a,
        per_axis,
        m: m_u128 as usize,
    })
}

/// Converts a cell cover into an explicit `CliqueCover` over row-major
/// vertex ids. Requires the grid to be small enough to materialize.
pub fn cells_to_clique_cover(disc: &Discretization, cover: &CellCover) -> Result<CliqueCover> {
    if disc.vertex_count() > super::EXPLICIT_GRAPH_CAP {
        return Err(Error::CapExceeded {
            what: "explicit cell cover",
            got: disc.vertex_count(),
            limit: super::EXPLICIT_GRAPH_CAP,
        });
    }
    let mut parts = vec![Vec::new(); cover.len()];
    for (id, part) in parts.iter_mut().enumerate() {
        for rank in 0..cover.cell_size(id) {
            let p = cover.point_at(id, rank);
            part.push(disc.index_of(&p) as u32);
        }
    }
    CliqueCover::new(parts)
}

/// Exhaustively confirms that every cell induces a clique: all within-cell
/// pairs conflict. Intended for grids small enough to enumerate.
pub fn verify_cells_are_cliques(disc: &Discretization, cover: &CellCover) -> Result<()> {
    for id in 0..cover.len() {
        let size = cover.cell_size(id);
        for i in 0..size {
            let p = cover.point_at(id, i);
            for j in i + 1..size {
                let q = cover.point_at(id, j);
                if !disc.points_conflict(&p, &q) {
                    return Err(Error::Validation(format!(
                        "cell {id} is not a clique: {p:?} and {q:?} do not conflict"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hs::{EdgeRule, HardSphereInstance};

    #[test]
    fn one_dimensional_cells() {
        // d=1, ell=4, rho=4: threshold dist < 4, a = floor(4/1) = 4,
        // 16 grid points in 4 cells of 4 points each.
        let inst = HardSphereInstance::new(1, 4.0, 1.0).unwrap();
        let disc = Discretization::new(inst, 4.0, EdgeRule::Strict).unwrap();
        let cover = cell_clique_cover(&disc).unwrap();
        assert_eq!(cover.a(), 4);
        assert_eq!(cover.len(), 4);
        assert_eq!(cover.cell_size(0), 4);
        assert_eq!(cover.point_at(1, 0), vec![4]);
        verify_cells_are_cliques(&disc, &cover).unwrap();
    }

    #[test]
    fn trimmed_boundary_cells() {
        // side 10, a 4 -> cells per axis 3 with extents 4, 4, 2.
        let inst = HardSphereInstance::new(1, 2.5, 1.0).unwrap();
        let disc = Discretization::new(inst, 4.0, EdgeRule::Strict).unwrap();
        let cover = cell_clique_cover(&disc).unwrap();
        assert_eq!(cover.cells_per_axis(), 3);
        assert_eq!(cover.cell_size(2), 2);
        assert_eq!(cover.point_at(2, 1), vec![9]);
        assert_eq!(cover.max_cell_size(), 4);
    }

    #[test]
    fn two_dimensional_cells_are_cliques() {
        let inst = HardSphereInstance::new(2, 4.0, 0.2).unwrap();
        let disc = Discretization::new(inst, 4.0, EdgeRule::Strict).unwrap();
        // 2 rho r = 8/sqrt(pi) ~ 4.51; a = floor(4.51/sqrt(2)) = 3.
        let cover = cell_clique_cover(&disc).unwrap();
        assert_eq!(cover.a(), 3);
        assert_eq!(cover.cells_per_axis(), 6);
        assert_eq!(cover.len(), 36);
        verify_cells_are_cliques(&disc, &cover).unwrap();
        // Every grid point lands in exactly one cell that contains it.
        for idx in 0..disc.vertex_count() {
            let p = disc.point_of(idx);
            let id = cover.cell_of(&p);
            let o = cover.cell_origin(id);
            let e = cover.cell_extents(id);
            for axis in 0..2 {
                assert!(o[axis] <= p[axis] && p[axis] < o[axis] + e[axis]);
            }
        }
    }

    #[test]
    fn rejects_too_coarse_grids() {
        // d=2, rho=1: 2 rho r ~ 1.128 < sqrt(2): no positive cell side works.
        let inst = HardSphereInstance::new(2, 4.0, 0.2).unwrap();
        let disc = Discretization::new(inst, 1.0, EdgeRule::Strict).unwrap();
        assert!(cell_clique_cover(&disc).is_err());
    }

    #[test]
    fn explicit_cover_is_valid_and_disjoint() {
        let inst = HardSphereInstance::new(2, 2.0, 0.3).unwrap();
        let disc = Discretization::new(inst, 2.0, EdgeRule::Strict).unwrap();
        let cover = cell_clique_cover(&disc).unwrap();
        let cliques = cells_to_clique_cover(&disc, &cover).unwrap();
        let (hc, _) = disc.explicit_graph().unwrap();
        let report = crate::hardcore::validate_clique_cover(&hc, &cliques);
        assert!(report.valid(), "{:?}", report.problems);
        assert!(report.disjoint);
    }
}
