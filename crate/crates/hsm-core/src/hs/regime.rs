//! Fugacity regime checks, degree bounds, and resolution selection.

use super::dd::{dd_from_u128, Dd};
use super::{
    cell_clique_cover, unit_ball_volume, CellCover, Discretization, EdgeRule, HardSphereInstance,
    MAX_DIMENSION,
};
use crate::error::{Error, Result};
use serde::Serialize;

/// Result of checking `lambda <= (1 - delta) * e / 2^d`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeCheck {
    pub lambda: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Checks the fugacity against the convergence regime `(1-delta) e / 2^d`.
pub fn check_fugacity_regime(inst: &HardSphereInstance, delta: f64) -> Result<RegimeCheck> {
    inst.validate()?;
    validate_delta(delta)?;
    let bound = (1.0 - delta) * std::f64::consts::E / 2f64.powi(inst.d as i32);
    Ok(RegimeCheck {
        lambda: inst.lambda,
        bound,
        ok: inst.lambda <= bound,
    })
}

fn validate_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && 0.0 < delta && delta < 1.0) {
        return Err(Error::Validation(format!(
            "delta must lie strictly between 0 and 1, got {delta}"
        )));
    }
    Ok(())
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && 0.0 < gamma && gamma <= 1.0) {
        return Err(Error::Validation(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    Ok(())
}

/// Exact number of integer points in the closed d-ball of the given radius
/// (counting the origin). Enumerates the bounding box with pruning; the
/// boundary test compares exact integer squared norms against the squared
/// radius carried in double-double precision.
pub fn integer_sphere_count(d: u32, radius: f64) -> Result<u128> {
    if d < 1 || d > MAX_DIMENSION {
        return Err(Error::Validation(format!(
            "dimension must be in 1..={MAX_DIMENSION}, got {d}"
        )));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Validation(format!(
            "radius must be finite and nonnegative, got {radius}"
        )));
    }
    let r = radius.floor() as i64;
    let box_points = (2 * r + 1) as u128;
    if box_points.pow(d) > 1 << 33 {
        return Err(Error::CapExceeded {
            what: "integer ball enumeration",
            got: box_points.pow(d),
            limit: 1 << 33,
        });
    }
    let rad = Dd::from_f64(radius);
    let radius_sq = rad.mul(rad);
    fn count(axes_left: u32, partial: u128, r: i64, radius_sq: Dd) -> u128 {
        if axes_left == 0 {
            return u128::from(dd_from_u128(partial).le(radius_sq));
        }
        let mut total = 0u128;
        for x in -r..=r {
            let p = partial + (x * x) as u128;
            if dd_from_u128(p).le(radius_sq) {
                total += count(axes_left - 1, p, r, radius_sq);
            }
        }
        total
    }
    Ok(count(d, 0, r, radius_sq))
}

/// The proven envelope for that count, `(1 + gamma) * nu_d * (rho s)^d`,
/// valid whenever `rho >= (2 sqrt(d))^d / (gamma s)`. Errors when that
/// resolution precondition fails.
pub fn integer_sphere_bound(d: u32, s: f64, rho: f64, gamma: f64) -> Result<f64> {
    if d < 1 || d > MAX_DIMENSION {
        return Err(Error::Validation(format!(
            "dimension must be in 1..={MAX_DIMENSION}, got {d}"
        )));
    }
    validate_gamma(gamma)?;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Validation(format!(
            "ball radius factor must be positive, got {s}"
        )));
    }
    let needed = (2.0 * (d as f64).sqrt()).powi(d as i32) / (gamma * s);
    if !(rho >= needed) {
        return Err(Error::Validation(format!(
            "resolution {rho} is below the envelope precondition {needed:.6}"
        )));
    }
    Ok((1.0 + gamma) * unit_ball_volume(d) * (rho * s).powi(d as i32))
}

/// An upper bound on the grid graph's maximum degree.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegreeBound {
    /// `(1 + gamma) * (2 rho)^d`.
    pub bound: f64,
    /// Smallest resolution at which the bound is proven.
    pub rho_threshold: f64,
    /// Whether this discretization's resolution reaches the threshold.
    pub precondition_met: bool,
}

/// Degree bound `(1 + gamma) (2 rho)^d`, valid for
/// `rho >= (2 sqrt(d))^d / (gamma * 2r)`. Reports whether the
/// precondition holds rather than erroring, so callers can surface it.
pub fn max_degree_bound(disc: &Discretization, gamma: f64) -> Result<DegreeBound> {
    validate_gamma(gamma)?;
    let d = disc.instance().d;
    let two_r = 2.0 * disc.instance().radius();
    let rho_threshold = (2.0 * (d as f64).sqrt()).powi(d as i32) / (gamma * two_r);
    Ok(DegreeBound {
        bound: (1.0 + gamma) * (2.0 * disc.rho()).powi(d as i32),
        rho_threshold,
        precondition_met: disc.rho() >= rho_threshold,
    })
}

/// Uniqueness threshold of the infinite tree with real-valued degree,
/// evaluated in log space. Matches `hardcore::tree_threshold` on integers
/// and extends it to the huge effective degrees grids produce.
fn tree_threshold_real(degree: f64) -> Result<f64> {
    if !(degree >= 3.0) {
        return Err(Error::Validation(format!(
            "tree threshold requires degree >= 3, got {degree}"
        )));
    }
    // (deg-1)^(deg-1)/(deg-2)^deg, rearranged so the two log terms never
    // cancel: (deg-1) ln(1 + 1/(deg-2)) stays near 1 for huge degrees.
    Ok(((degree - 1.0) * (1.0 / (degree - 2.0)).ln_1p() - (degree - 2.0).ln()).exp())
}

/// Result of comparing the grid fugacity against the tree threshold at the
/// grid's proven degree bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightCheck {
    pub gamma: f64,
    pub delta_prime: f64,
    /// `(1 + gamma) (2 rho)^d`, the degree bound the threshold is taken at.
    pub degree_bound: f64,
    /// `(1 - delta_prime) * threshold(degree_bound)`.
    pub allowed: f64,
    pub lambda_rho: f64,
    /// Whether the degree-bound precondition on the resolution holds.
    pub degree_precondition_met: bool,
    pub ok: bool,
}

/// Checks that the grid fugacity sits below the tree threshold with margin:
/// `lambda_rho <= (1 - delta/2) * threshold((1 + delta/2)(2 rho)^d)`.
///
/// This is the sufficient condition under which clique dynamics on the grid
/// mixes fast; it holds automatically at high enough resolution whenever
/// the continuous fugacity satisfies the `(1-delta) e / 2^d` regime.
pub fn discretized_weight_below_threshold(
    disc: &Discretization,
    delta: f64,
) -> Result<WeightCheck> {
    validate_delta(delta)?;
    let gamma = delta / 2.0;
    let delta_prime = delta / 2.0;
    let degree = max_degree_bound(disc, gamma)?;
    let allowed = match tree_threshold_real(degree.bound) {
        Ok(threshold) => (1.0 - delta_prime) * threshold,
        Err(_) => 0.0, // degree bound below 3: the margin test cannot pass
    };
    Ok(WeightCheck {
        gamma,
        delta_prime,
        degree_bound: degree.bound,
        allowed,
        lambda_rho: disc.lambda_rho(),
        degree_precondition_met: degree.precondition_met,
        ok: degree.precondition_met && disc.lambda_rho() <= allowed,
    })
}

/// The explicit constant in the discretization error bound
/// `|Z_continuous - Z_grid| <= constant / rho`:
/// `4 K^2 ell^(d(K-1)) sqrt(d) (2r+1)^d e^lambda` with
/// `K = (ell sqrt(d) / (2r))^d`.
///
/// Grows super-exponentially with the box volume; overflow to infinity is
/// reported as an error.
pub fn convergence_constant(inst: &HardSphereInstance) -> Result<f64> {
    inst.validate()?;
    let d = inst.d as f64;
    let two_r = 2.0 * inst.radius();
    let k = (inst.ell * d.sqrt() / two_r).powf(d);
    let c = 4.0
        * k
        * k
        * inst.ell.powf(d * (k - 1.0))
        * d.sqrt()
        * (two_r + 1.0).powf(d)
        * inst.lambda.exp();
    if !c.is_finite() {
        return Err(Error::Overflow("discretization error constant"));
    }
    Ok(c)
}

/// Picks the smallest admissible resolution: the least `rho` with
/// `rho * ell` integer satisfying
/// `rho >= max(2 sqrt(d), (2 sqrt(d))^d / (gamma 2r), constant / eps_prime)`,
/// where `constant` is [`convergence_constant`]. Uses the strict edge rule.
pub fn choose_resolution(
    inst: &HardSphereInstance,
    eps_prime: f64,
    gamma: f64,
) -> Result<Discretization> {
    inst.validate()?;
    validate_gamma(gamma)?;
    if !(eps_prime.is_finite() && eps_prime > 0.0) {
        return Err(Error::Validation(format!(
            "target accuracy must be positive, got {eps_prime}"
        )));
    }
    let d = inst.d as f64;
    let two_r = 2.0 * inst.radius();
    let rho_min = (2.0 * d.sqrt())
        .max((2.0 * d.sqrt()).powi(inst.d as i32) / (gamma * two_r))
        .max(convergence_constant(inst)? / eps_prime);
    let mut side = (rho_min * inst.ell).ceil();
    if !side.is_finite() || side > 2f64.powi(40) {
        return Err(Error::Overflow("grid side"));
    }
    while side / inst.ell < rho_min {
        side += 1.0;
    }
    Discretization::new(*inst, side / inst.ell, EdgeRule::Strict)
}

/// Regime indicators reported alongside hard-sphere estimates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeFlags {
    pub fugacity_in_regime: bool,
    pub rho_at_least_two_sqrt_d: bool,
    pub degree_precondition_met: bool,
    pub weight_below_tree_threshold: bool,
}

/// Everything worth reporting about a discretization choice.
#[derive(Debug, Clone, Serialize)]
pub struct DiscretizationReport {
    pub d: u32,
    pub ell: f64,
    pub lambda: f64,
    pub rho: f64,
    pub grid_side: i64,
    pub lambda_rho: f64,
    /// Cell side of the clique cover.
    pub a: i64,
    /// Number of cells.
    pub m: usize,
    pub max_cell_size: u64,
    /// Largest per-cell partition function `1 + cell_size * lambda_rho`.
    pub z_max: f64,
    pub degree_bound: DegreeBound,
    pub flags: RegimeFlags,
}

/// Assembles the report for a discretization, its cell cover, and the
/// margin parameter `delta` (with `gamma = delta / 2` throughout).
pub fn discretization_report(
    disc: &Discretization,
    cover: &CellCover,
    delta: f64,
) -> Result<DiscretizationReport> {
    let inst = *disc.instance();
    let gamma = delta / 2.0;
    let regime = check_fugacity_regime(&inst, delta)?;
    let degree = max_degree_bound(disc, gamma)?;
    let weight = discretized_weight_below_threshold(disc, delta)?;
    let max_cell = cover.max_cell_size();
    Ok(DiscretizationReport {
        d: inst.d,
        ell: inst.ell,
        lambda: inst.lambda,
        rho: disc.rho(),
        grid_side: disc.side(),
        lambda_rho: disc.lambda_rho(),
        a: cover.a(),
        m: cover.len(),
        max_cell_size: max_cell,
        z_max: 1.0 + max_cell as f64 * disc.lambda_rho(),
        degree_bound: degree,
        flags: RegimeFlags {
            fugacity_in_regime: regime.ok,
            rho_at_least_two_sqrt_d: disc.rho() >= 2.0 * (inst.d as f64).sqrt(),
            degree_precondition_met: weight.degree_precondition_met,
            weight_below_tree_threshold: weight.ok,
        },
    })
}

/// Convenience: choose a resolution and build its cell cover and report.
pub fn prepare_grid(
    inst: &HardSphereInstance,
    eps_prime: f64,
    delta: f64,
) -> Result<(Discretization, CellCover, DiscretizationReport)> {
    validate_delta(delta)?;
    let disc = choose_resolution(inst, eps_prime, delta / 2.0)?;
    let cover = cell_clique_cover(&disc)?;
    let report = discretization_report(&disc, &cover, delta)?;
    Ok((disc, cover, report))
}
