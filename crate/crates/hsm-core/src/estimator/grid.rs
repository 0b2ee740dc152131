//! Telescoping estimator over discretized hard-sphere grids.
//!
//! The grid is far too large to materialize, but its cell cover makes the
//! chain state compact: each cell is a clique, so it holds at most one
//! occupied point. A replicate keeps one occupancy flag and one coordinate
//! vector per cell, and conflict checks scan only the few cells within the
//! conflict radius.

use super::{EstimateReport, EstimatorConfig};
use crate::error::{Error, Result};
use crate::hs::dd::dd_from_u128;
use crate::hs::{
    check_fugacity_regime, prepare_grid, CellCover, Discretization, EdgeRule, HardSphereInstance,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Flattened per-cell geometry so the inner loop never allocates.
struct GridSampler {
    d: usize,
    m: usize,
    per_axis: i64,
    /// Per-cell lattice coordinates (`m * d`).
    lattice: Vec<i64>,
    /// Per-cell low corners (`m * d`).
    origins: Vec<i64>,
    /// Per-cell extents (`m * d`).
    extents: Vec<i64>,
    /// Per-cell point counts.
    sizes: Vec<u64>,
    /// Per-cell local partition functions `1 + size * lambda_rho`.
    zs: Vec<f64>,
    /// Cells within this many lattice steps per axis can hold conflicts.
    reach: i64,
    /// Largest integer squared distance that conflicts; exact under the
    /// discretization's edge rule.
    cutoff: u128,
    lambda_rho: f64,
}

impl GridSampler {
    fn new(disc: &Discretization, cover: &CellCover) -> Self {
        let d = cover.d();
        let m = cover.len();
        let mut lattice = vec![0i64; m * d];
        let mut origins = vec![0i64; m * d];
        let mut extents = vec![0i64; m * d];
        let mut sizes = vec![0u64; m];
        let mut zs = vec![0.0; m];
        for id in 0..m {
            let o = cover.cell_origin(id);
            let e = cover.cell_extents(id);
            for axis in 0..d {
                lattice[id * d + axis] = o[axis] / cover.a();
                origins[id * d + axis] = o[axis];
                extents[id * d + axis] = e[axis];
            }
            sizes[id] = cover.cell_size(id);
            zs[id] = 1.0 + sizes[id] as f64 * disc.lambda_rho();
        }
        Self {
            d,
            m,
            per_axis: cover.cells_per_axis(),
            lattice,
            origins,
            extents,
            sizes,
            zs,
            reach: (disc.max_conflict_offset() + cover.a() - 1) / cover.a() + 1,
            cutoff: conflict_cutoff(disc),
            lambda_rho: disc.lambda_rho(),
        }
    }

    /// Decodes the `rank`-th point of cell `id` into `p`.
    fn decode(&self, id: usize, mut rank: u64, p: &mut [i64]) {
        for axis in (0..self.d).rev() {
            let e = self.extents[id * self.d + axis] as u64;
            p[axis] = self.origins[id * self.d + axis] + (rank % e) as i64;
            rank /= e;
        }
    }

    /// Whether placing `p` (a point of cell `id`) conflicts with any
    /// occupied point. Scans the lattice window that can reach `p`.
    fn blocked(&self, id: usize, p: &[i64], occupied: &[bool], coords: &[i64]) -> bool {
        let d = self.d;
        let mut lo = [0i64; 8];
        let mut hi = [0i64; 8];
        let mut cur = [0i64; 8];
        for axis in 0..d {
            let lat = self.lattice[id * d + axis];
            lo[axis] = (lat - self.reach).max(0);
            hi[axis] = (lat + self.reach).min(self.per_axis - 1);
            cur[axis] = lo[axis];
        }
        loop {
            let cell = cur[..d].iter().fold(0i64, |acc, &c| acc * self.per_axis + c) as usize;
            if occupied[cell] {
                let mut dist = 0u128;
                for axis in 0..d {
                    let delta = (coords[cell * d + axis] - p[axis]) as i128;
                    dist += (delta * delta) as u128;
                }
                if dist != 0 && dist <= self.cutoff {
                    return true;
                }
            }
            let mut axis = d;
            loop {
                if axis == 0 {
                    return false;
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    for a in axis + 1..d {
                        cur[a] = lo[a];
                    }
                    break;
                }
                cur[axis] = lo[axis];
            }
        }
    }

    /// Runs one replicate chain on the cells `first..m` from the empty
    /// configuration; reports whether cell `first` ended unoccupied.
    ///
    /// Each step consumes exactly two uniform draws, mirroring the explicit
    /// clique step: the in-cell point is recovered from the second draw by
    /// division, which is valid because all weights in a cell are equal.
    fn sample_indicator(
        &self,
        first: usize,
        steps: u64,
        seed: u64,
        stream: u64,
        occupied: &mut [bool],
        coords: &mut [i64],
        scratch: &mut [i64],
    ) -> bool {
        occupied.fill(false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let count = (self.m - first) as f64;
        for _ in 0..steps {
            let u1: f64 = rng.random();
            let id = first + ((u1 * count) as usize).min(self.m - first - 1);
            let u2: f64 = rng.random();
            let scaled = u2 * self.zs[id] - 1.0;
            if scaled < 0.0 {
                occupied[id] = false;
                continue;
            }
            let rank = ((scaled / self.lambda_rho) as u64).min(self.sizes[id] - 1);
            self.decode(id, rank, scratch);
            if !self.blocked(id, scratch, occupied, coords) {
                occupied[id] = true;
                coords[id * self.d..(id + 1) * self.d].copy_from_slice(scratch);
            }
        }
        !occupied[first]
    }
}

/// Largest integer squared distance that still conflicts. The conflict
/// predicate is monotone in the squared distance, so a binary search against
/// the extended-precision threshold finds the exact integer cutoff once and
/// the inner loop compares plain integers.
fn conflict_cutoff(disc: &Discretization) -> u128 {
    let reach = disc.max_conflict_offset() as u128 + 1;
    let d = disc.instance().d as u128;
    let mut lo = 0u128;
    let mut hi = reach * reach * d;
    debug_assert!(!in_conflict(disc, hi));
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if in_conflict(disc, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn in_conflict(disc: &Discretization, dist_sq: u128) -> bool {
    if dist_sq == 0 {
        return false;
    }
    let q = dd_from_u128(dist_sq);
    match disc.edge_rule() {
        EdgeRule::Strict => q.lt(disc.threshold_sq()),
        EdgeRule::Closed => q.le(disc.threshold_sq()),
    }
}

/// Estimates the continuous hard-sphere partition function to relative
/// accuracy `epsilon`, requiring the fugacity regime with margin `delta`.
///
/// The accuracy budget is split three ways: a third for the discretization
/// error (which fixes the resolution), and the rest for the sampling error
/// of the telescoping product over the grid's cell cover. The result is a
/// deterministic function of `(instance, epsilon, delta, seed)`.
pub fn estimate_hard_sphere(
    inst: &HardSphereInstance,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<EstimateReport> {
    let start_time = Instant::now();
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Validation(format!(
            "target accuracy must be positive, got {epsilon}"
        )));
    }
    let regime = check_fugacity_regime(inst, delta)?;
    if !regime.ok {
        return Err(Error::Regime(format!(
            "fugacity {} exceeds the admissible bound {:.6} (dimension {}, margin {})",
            regime.lambda, regime.bound, inst.d, delta
        )));
    }
    let eps_prime = epsilon / 3.0;
    let (disc, cover, report) = prepare_grid(inst, eps_prime, delta)?;
    let flags = report.flags;
    let config = EstimatorConfig::new(eps_prime, seed);
    let budget = config.budget(cover.len(), report.z_max)?;
    let sampler = GridSampler::new(&disc, &cover);
    let m = sampler.m;
    let d = sampler.d;
    let mut ratios = Vec::with_capacity(m);
    let mut sample_counts = Vec::with_capacity(m);
    let mut log_z = 0.0;
    for i in 0..m {
        let s = budget.samples_per_ratio;
        let hits: u64 = (0..s)
            .into_par_iter()
            .map_init(
                || (vec![false; m], vec![0i64; m * d], vec![0i64; d]),
                |(occupied, coords, scratch), k| {
                    let stream = ((i as u64) << 32) | k;
                    u64::from(sampler.sample_indicator(
                        i,
                        budget.steps_per_sample,
                        seed,
                        stream,
                        occupied,
                        coords,
                        scratch,
                    ))
                },
            )
            .sum();
        if hits == 0 {
            return Err(Error::ZeroFrequency {
                clique: i,
                samples: s,
            });
        }
        let p = hits as f64 / s as f64;
        log_z -= p.ln();
        ratios.push(p);
        sample_counts.push(s);
    }
    Ok(EstimateReport {
        estimate: log_z.exp(),
        log_estimate: log_z,
        ratios,
        sample_counts,
        m,
        z_max: report.z_max,
        epsilon,
        seed,
        budget,
        discretization: Some(report),
        regime_flags: Some(flags),
        wall_time: start_time.elapsed(),
    })
}
