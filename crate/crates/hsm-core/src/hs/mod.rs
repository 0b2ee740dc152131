//! Discretizing a hard-sphere gas in a box onto an integer grid.
//!
//! The continuous model places spheres of radius `r` (chosen so a sphere
//! has unit volume) in the box `[0, ell]^d` with fugacity `lambda`; a
//! configuration is valid when centers are pairwise at least `2r` apart.
//! Scaling the box by a resolution `rho` and restricting centers to integer
//! coordinates yields a hard-core instance on the grid `{0..rho*ell-1}^d`:
//! two grid points conflict when their Euclidean distance is positive and
//! below `2*rho*r`, and each point carries fugacity `lambda / rho^d`. As
//! `rho` grows, the grid partition function converges to the continuous one.

mod cover;
pub(crate) mod dd;
mod regime;
mod tonks;

pub use cover::{cell_clique_cover, cells_to_clique_cover, verify_cells_are_cliques, CellCover};
pub use regime::{
    check_fugacity_regime, choose_resolution, convergence_constant, discretization_report,
    discretized_weight_below_threshold, integer_sphere_bound, integer_sphere_count,
    max_degree_bound, prepare_grid, DegreeBound, DiscretizationReport, RegimeCheck, RegimeFlags,
    WeightCheck,
};
pub use tonks::tonks_gas_z;

use crate::error::{Error, Result};
use crate::hardcore::{Graph, HardCoreInstance};
use dd::{dd_from_u128, Dd};
use serde::{Deserialize, Serialize};

/// A point of the discretized box: `d` integer coordinates in `0..side`.
pub type GridPoint = Vec<i64>;

/// Largest dimension the geometry helpers accept.
pub const MAX_DIMENSION: u32 = 8;

/// Largest vertex count for which the grid graph may be materialized.
pub const EXPLICIT_GRAPH_CAP: u128 = 4096;

/// Volume of the d-dimensional unit ball, by the two-step recurrence
/// `nu_d = nu_(d-2) * 2 pi / d` from `nu_0 = 1`, `nu_1 = 2`.
pub fn unit_ball_volume(d: u32) -> f64 {
    unit_ball_volume_dd(d).to_f64()
}

fn unit_ball_volume_dd(d: u32) -> Dd {
    let two_pi = Dd::pi().mul_f64(2.0);
    let mut values = [Dd::from_f64(1.0), Dd::from_f64(2.0)];
    if d < 2 {
        return values[d as usize];
    }
    for k in 2..=d {
        let next = values[(k % 2) as usize].mul(two_pi).div(Dd::from_f64(k as f64));
        values[(k % 2) as usize] = next;
    }
    values[(d % 2) as usize]
}

/// Radius at which a d-dimensional sphere has unit volume: `(1/nu_d)^(1/d)`.
pub fn sphere_radius(d: u32) -> f64 {
    (1.0 / unit_ball_volume(d)).powf(1.0 / d as f64)
}

/// A continuous hard-sphere instance: dimension, box side, fugacity.
///
/// Sphere radius is derived, not stored: spheres have unit volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardSphereInstance {
    pub d: u32,
    pub ell: f64,
    pub lambda: f64,
}

impl HardSphereInstance {
    pub fn new(d: u32, ell: f64, lambda: f64) -> Result<Self> {
        let inst = Self { d, ell, lambda };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 || self.d > MAX_DIMENSION {
            return Err(Error::Validation(format!(
                "dimension must be in 1..={MAX_DIMENSION}, got {}",
                self.d
            )));
        }
        if !(self.ell.is_finite() && self.ell >= 1.0) {
            return Err(Error::Validation(format!(
                "box side must be finite and at least 1, got {}",
                self.ell
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Validation(format!(
                "fugacity must be positive and finite, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.ell.powi(self.d as i32)
    }

    pub fn radius(&self) -> f64 {
        sphere_radius(self.d)
    }
}

/// Which pairs of grid points conflict (are joined by an edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeRule {
    /// Conflict iff `0 < dist < 2 rho r` (the default; grid configurations
    /// then correspond exactly to valid continuous configurations with
    /// centers at distance >= 2r after unscaling).
    Strict,
    /// Conflict iff `0 < dist <= 2 rho r`; a slightly coarser variant kept
    /// available for comparison.
    Closed,
}

/// A hard-sphere instance scaled onto the integer grid `{0..side-1}^d`.
#[derive(Debug, Clone)]
pub struct Discretization {
    inst: HardSphereInstance,
    rho: f64,
    side: i64,
    lambda_rho: f64,
    /// (2 rho r)^2 to double-double precision.
    threshold_sq: Dd,
    rule: EdgeRule,
}

impl Discretization {
    /// Scales `inst` by resolution `rho`. `rho * ell` must be a positive
    /// integer (to within 1e-9 relative tolerance) so the grid tiles the box.
    pub fn new(inst: HardSphereInstance, rho: f64, rule: EdgeRule) -> Result<Self> {
        inst.validate()?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Validation(format!(
                "resolution must be positive and finite, got {rho}"
            )));
        }
        let side_f = rho * inst.ell;
        let side_rounded = side_f.round();
        if (side_f - side_rounded).abs() > 1e-9 * side_f.max(1.0) || side_rounded < 1.0 {
            return Err(Error::Validation(format!(
                "rho * ell must be a positive integer, got {side_f}"
            )));
        }
        if side_rounded > 2f64.powi(40) {
            return Err(Error::CapExceeded {
                what: "grid side",
                got: side_rounded as u128,
                limit: 1 << 40,
            });
        }
        let side = side_rounded as i64;
        let lambda_rho = inst.lambda / rho.powi(inst.d as i32);
        if !(lambda_rho.is_finite() && lambda_rho > 0.0) {
            return Err(Error::Overflow("grid fugacity"));
        }
        // threshold = 4 rho^2 / y where y solves y^d = nu_d^2.
        let nu = unit_ball_volume_dd(inst.d);
        let y = root_of_square(nu, inst.d);
        let rho_dd = Dd::from_f64(rho);
        let threshold_sq = rho_dd.mul(rho_dd).mul_f64(4.0).div(y);
        Ok(Self {
            inst,
            rho,
            side,
            lambda_rho,
            threshold_sq,
            rule,
        })
    }

    pub fn instance(&self) -> &HardSphereInstance {
        &self.inst
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Grid points per axis (`rho * ell`).
    pub fn side(&self) -> i64 {
        self.side
    }

    pub fn lambda_rho(&self) -> f64 {
        self.lambda_rho
    }

    pub fn edge_rule(&self) -> EdgeRule {
        self.rule
    }

    /// `2 rho r` as an f64 (reporting only; comparisons use the
    /// squared threshold in extended precision).
    pub fn conflict_radius(&self) -> f64 {
        self.threshold_sq.to_f64().sqrt()
    }

    pub(crate) fn threshold_sq(&self) -> Dd {
        self.threshold_sq
    }

    pub fn vertex_count(&self) -> u128 {
        (self.side as u128).pow(self.inst.d)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.inst.d as usize && p.iter().all(|&x| 0 <= x && x < self.side)
    }

    /// Squared-distance test against the conflict threshold. A zero offset
    /// never conflicts (a point does not conflict with itself).
    pub fn offset_in_conflict(&self, delta: &[i64]) -> bool {
        let q: u128 = delta.iter().map(|&x| (x as i128 * x as i128) as u128).sum();
        if q == 0 {
            return false;
        }
        let q = dd_from_u128(q);
        match self.rule {
            EdgeRule::Strict => q.lt(self.threshold_sq),
            EdgeRule::Closed => q.le(self.threshold_sq),
        }
    }

    pub fn points_conflict(&self, a: &[i64], b: &[i64]) -> bool {
        let delta: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        self.offset_in_conflict(&delta)
    }

    /// Largest per-axis coordinate offset that can still conflict.
    pub fn max_conflict_offset(&self) -> i64 {
        // sqrt of the threshold, rounded up generously; candidates are
        // confirmed by the exact predicate.
        self.threshold_sq.to_f64().sqrt().ceil() as i64
    }

    /// In-range conflicting neighbors of `p`, in lexicographic coordinate
    /// order. Scans the bounding box of the conflict ball and keeps the
    /// points the exact predicate confirms.
    pub fn neighbors(&self, p: &[i64]) -> Result<Vec<GridPoint>> {
        if !self.contains(p) {
            return Err(Error::Validation(format!(
                "point {p:?} is outside the grid (side {})",
                self.side
            )));
        }
        let d = self.inst.d as usize;
        let reach = self.max_conflict_offset();
        let mut out = Vec::new();
        let mut q = vec![0i64; d];
        let lows: Vec<i64> = p.iter().map(|&x| (x - reach).max(0)).collect();
        let highs: Vec<i64> = p.iter().map(|&x| (x + reach).min(self.side - 1)).collect();
        q.clone_from_slice(&lows);
        loop {
            if self.points_conflict(&q, p) {
                out.push(q.clone());
            }
            // lexicographic increment
            let mut axis = d;
            while axis > 0 {
                axis -= 1;
                if q[axis] < highs[axis] {
                    q[axis] += 1;
                    for a in axis + 1..d {
                        q[a] = lows[a];
                    }
                    break;
                }
                if axis == 0 {
                    return Ok(out);
                }
            }
        }
    }

    /// Row-major index of a grid point (last coordinate varies fastest).
    pub fn index_of(&self, p: &[i64]) -> u128 {
        p.iter()
            .fold(0u128, |acc, &x| acc * self.side as u128 + x as u128)
    }

    pub fn point_of(&self, mut idx: u128) -> GridPoint {
        let d = self.inst.d as usize;
        let mut p = vec![0i64; d];
        for axis in (0..d).rev() {
            p[axis] = (idx % self.side as u128) as i64;
            idx /= self.side as u128;
        }
        p
    }

    /// Materializes the grid as an explicit hard-core instance (row-major
    /// vertex order) together with each vertex's coordinates. Capped at
    /// [`EXPLICIT_GRAPH_CAP`] vertices.
    pub fn explicit_graph(&self) -> Result<(HardCoreInstance, Vec<GridPoint>)> {
        let count = self.vertex_count();
        if count > EXPLICIT_GRAPH_CAP {
            return Err(Error::CapExceeded {
                what: "explicit grid graph",
                got: count,
                limit: EXPLICIT_GRAPH_CAP,
            });
        }
        let n = count as usize;
        let points: Vec<GridPoint> = (0..n).map(|i| self.point_of(i as u128)).collect();
        let mut edges = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for q in self.neighbors(p)? {
                let j = self.index_of(&q) as usize;
                if i < j {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        let graph = Graph::new(n, &edges)?;
        let inst = HardCoreInstance::uniform(graph, self.lambda_rho)?;
        Ok((inst, points))
    }
}

/// Solves `y^d = s^2` for `y` (i.e. `s^(2/d)`) in double-double precision
/// by Newton iteration from an f64 seed.
fn root_of_square(s: Dd, d: u32) -> Dd {
    if d == 1 {
        return s.mul(s);
    }
    if d == 2 {
        return s;
    }
    let target = s.mul(s);
    let mut y = Dd::from_f64(s.to_f64().powf(2.0 / d as f64));
    for _ in 0..4 {
        // y -= (y^d - target) / (d * y^(d-1))
        let yd1 = y.powi(d - 1);
        let num = yd1.mul(y).sub(target);
        let den = yd1.mul_f64(d as f64);
        y = y.sub(num.div(den));
    }
    y
}
