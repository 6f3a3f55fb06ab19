//! Height and gradient estimates checked on computed fields.
//!
//! Every check records the bound, the measured value, the slack (positive
//! when the bound holds with room) and the tolerance it was judged with.

use serde::Serialize;
use thiserror::Error;

use crate::discretization::{ArmTarget, Field, Grid};
use crate::domain::{Domain, DomainError, Vec2, DEFAULT_BOUNDARY_SAMPLES};
use crate::mcoperator::{grad_norm, Signature};
use crate::solver::SolveOutcome;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("Serrin constant needs κ_min > |H| (κ_min = {kappa_min}, |H| = {abs_h})")]
    CurvatureTooSmall { kappa_min: f64, abs_h: f64 },
    #[error("comparison pair needs H_a < H_b (got {0} and {1})")]
    NotOrdered(f64, f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateCheck {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
}

impl EstimateCheck {
    fn with_slack(name: &str, bound: f64, measured: f64, slack: f64, tol: f64) -> Self {
        let finite = bound.is_finite() && measured.is_finite() && slack.is_finite();
        Self {
            name: name.to_string(),
            bound,
            measured,
            slack,
            tol,
            pass: finite && slack >= -tol,
        }
    }

    /// `measured ≤ bound`.
    pub fn upper(name: &str, bound: f64, measured: f64, tol: f64) -> Self {
        Self::with_slack(name, bound, measured, bound - measured, tol)
    }

    /// `measured ≥ bound`.
    pub fn lower(name: &str, bound: f64, measured: f64, tol: f64) -> Self {
        Self::with_slack(name, bound, measured, measured - bound, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportContext {
    pub domain: String,
    pub mean_curvature: f64,
    pub signature: Signature,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub context: ReportContext,
    pub checks: Vec<EstimateCheck>,
}

impl EstimateReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// A report containing a NaN is invalid.
    pub fn is_valid(&self) -> bool {
        self.checks
            .iter()
            .all(|c| !(c.bound.is_nan() || c.measured.is_nan() || c.slack.is_nan() || c.tol.is_nan()))
    }

    pub fn check(&self, name: &str) -> Option<&EstimateCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tolerance of height checks at spacing `h`.
pub fn height_tolerance(h: f64) -> f64 {
    8.0 * h * h
}

/// `(min φ, max φ)` over `n` boundary samples together with the grid's
/// Dirichlet locations.
pub fn boundary_data_range(
    domain: &Domain,
    grid: Option<&Grid>,
    boundary_data: &dyn Fn(Vec2) -> f64,
    n: usize,
) -> Result<(f64, f64), DomainError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |p: Vec2| {
        let v = boundary_data(p);
        lo = lo.min(v);
        hi = hi.max(v);
    };
    for b in domain.boundary_sample(n)? {
        visit(b.position);
    }
    if let Some(g) = grid {
        for &p in g.boundary_points() {
            visit(p);
        }
    }
    Ok((lo, hi))
}

/// Euclidean height bounds: `min φ − 1/H ≤ u ≤ max φ` for `H > 0`,
/// mirrored for `H < 0`, and `min φ ≤ u ≤ max φ` for `H = 0`.
pub fn check_height_euclidean(
    field: &Field,
    mean_curvature: f64,
    phi_range: (f64, f64),
    h: f64,
) -> [EstimateCheck; 2] {
    let depth = if mean_curvature == 0.0 { 0.0 } else { 1.0 / mean_curvature.abs() };
    let (lo, hi) = if mean_curvature >= 0.0 {
        (phi_range.0 - depth, phi_range.1)
    } else {
        (phi_range.0, phi_range.1 + depth)
    };
    let tol = height_tolerance(h);
    [
        EstimateCheck::lower("height_euclid_lower", lo, field.min(), tol),
        EstimateCheck::upper("height_euclid_upper", hi, field.max(), tol),
    ]
}

/// Lorentzian height bounds from enclosing disks (diameter) and enclosing
/// strips (width `Θ`). The measured value is the largest excursion of `u`
/// beyond `[min φ, max φ]`.
pub fn check_height_lorentz(
    field: &Field,
    mean_curvature: f64,
    phi_range: (f64, f64),
    diameter: f64,
    strip_width: f64,
    h: f64,
) -> (EstimateCheck, EstimateCheck) {
    let a = mean_curvature.abs();
    let diam_bound = ((1.0 + diameter * diameter * a * a / 4.0).sqrt() - 1.0) / a;
    let strip_bound = ((1.0 + strip_width * strip_width * a * a).sqrt() - 1.0) / (2.0 * a);
    let excursion = (phi_range.0 - field.min()).max(field.max() - phi_range.1);
    let tol = height_tolerance(h);
    (
        EstimateCheck::upper("height_lorentz_diameter", diam_bound, excursion, tol),
        EstimateCheck::upper("height_lorentz_strip", strip_bound, excursion, tol),
    )
}

/// Largest `|D²u|` entry over the unknowns.
fn hessian_scale(grid: &Grid, field: &Field) -> f64 {
    (0..grid.num_unknowns())
        .map(|u| grid.jet_at(field, u).d2u.max_abs())
        .fold(0.0, f64::max)
}

/// `sup |Du|` is attained near the boundary: the maximum over unknowns
/// farther than `2h` from it may exceed the near-boundary maximum by at most
/// `5h · max|D²u|`.
pub fn check_gradient_boundary_max(field: &Field, grid: &Grid) -> EstimateCheck {
    let mut near: f64 = 0.0;
    let mut far: f64 = 0.0;
    for (u, d) in grid.gradients(field).into_iter().enumerate() {
        let g = grad_norm(d);
        if grid.is_near_boundary(u) {
            near = near.max(g);
        } else {
            far = far.max(g);
        }
    }
    let tol = 5.0 * grid.h() * hessian_scale(grid, field);
    EstimateCheck::upper("gradient_boundary_max", near, far, tol)
}

/// `C = √(κ_min² − H²)/κ_min` and the gradient bound `√(1 − C²)/C`.
pub fn serrin_gradient_constant(kappa_min: f64, mean_curvature: f64) -> Result<(f64, f64), EstimateError> {
    let abs_h = mean_curvature.abs();
    if !(kappa_min > abs_h) {
        return Err(EstimateError::CurvatureTooSmall { kappa_min, abs_h });
    }
    let c = (kappa_min * kappa_min - abs_h * abs_h).sqrt() / kappa_min;
    Ok((c, (1.0 - c * c).sqrt() / c))
}

/// [`serrin_gradient_constant`] with `κ_min` taken from the domain.
pub fn serrin_gradient_constant_for(domain: &Domain, mean_curvature: f64) -> Result<(f64, f64), EstimateError> {
    let k = domain.curvature_range(DEFAULT_BOUNDARY_SAMPLES)?;
    serrin_gradient_constant(k.min, mean_curvature)
}

fn boundary_normal(domain: &Domain, p: Vec2) -> Vec2 {
    // outward normal from the signed level function
    let e = 1e-6 * domain.diameter();
    let gx = domain.level(p + Vec2::new(e, 0.0)) - domain.level(p - Vec2::new(e, 0.0));
    let gy = domain.level(p + Vec2::new(0.0, e)) - domain.level(p - Vec2::new(0.0, e));
    Vec2::new(gx, gy).normalized()
}

/// Gradient magnitudes at the boundary intersections of axis arms.
///
/// Along an arm from node `x` to its boundary point at distance `θh`, `u` is
/// fitted by the quadratic through the opposite neighbour, the node and the
/// boundary value, and differentiated at the boundary. The normal derivative
/// follows by removing the tangential derivative of `φ`. Arms meeting the
/// boundary at a grazing angle (`|ν·e| < 1/2`) are skipped.
pub fn boundary_gradients(
    domain: &Domain,
    grid: &Grid,
    field: &Field,
    boundary_data: &dyn Fn(Vec2) -> f64,
) -> Vec<(Vec2, f64)> {
    let h = grid.h();
    let dirs = [
        Vec2::new(1.0, 0.0),
        Vec2::new(-1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(0.0, -1.0),
    ];
    let opposite = [1, 0, 3, 2];
    let mut out = Vec::new();
    for u in 0..grid.num_unknowns() {
        let arms = grid.arms(u);
        for k in 0..4 {
            let ArmTarget::Boundary(b) = arms[k].target else {
                continue;
            };
            let back = arms[opposite[k]];
            let ArmTarget::Unknown(v) = back.target else {
                continue;
            };
            if back.theta != 1.0 {
                continue;
            }
            let p = grid.boundary_points()[b];
            let e = dirs[k];
            let nu = boundary_normal(domain, p);
            let cos = nu.dot(e);
            if cos.abs() < 0.5 {
                continue;
            }
            let a = arms[k].theta * h;
            let (f0, f1, f2) = (field.values[v], field.values[u], field.boundary_values[b]);
            let de = f0 * a / (h * (h + a)) - f1 * (a + h) / (h * a) + f2 * (2.0 * a + h) / ((a + h) * a);
            let tau = nu.perp();
            let s = 1e-6 * domain.diameter();
            let dtau = (boundary_data(p + tau * s) - boundary_data(p - tau * s)) / (2.0 * s);
            let dnu = (de - tau.dot(e) * dtau) / cos;
            out.push((p, dnu.hypot(dtau)));
        }
    }
    out
}

/// Largest `|Du|` at the boundary, see [`boundary_gradients`].
pub fn boundary_gradient_max(
    domain: &Domain,
    grid: &Grid,
    field: &Field,
    boundary_data: &dyn Fn(Vec2) -> f64,
) -> f64 {
    boundary_gradients(domain, grid, field, boundary_data)
        .into_iter()
        .map(|(_, g)| g)
        .fold(0.0, f64::max)
}

/// H-monotonicity: with equal boundary data, `H_a < H_b ⇒ u_b ≤ u_a`.
pub fn check_comparison_pair(
    field_a: &Field,
    h_a: f64,
    field_b: &Field,
    h_b: f64,
) -> Result<EstimateCheck, EstimateError> {
    if !(h_a < h_b) {
        return Err(EstimateError::NotOrdered(h_a, h_b));
    }
    if field_a.values.len() != field_b.values.len() {
        return Err(EstimateError::GridMismatch);
    }
    let violation = field_b
        .values
        .iter()
        .zip(&field_a.values)
        .map(|(b, a)| b - a)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EstimateCheck::upper("comparison_h_monotone", 0.0, violation, 1e-8))
}

/// Two solves with the same data agree within twice the Newton tolerance.
pub fn check_uniqueness(field_a: &Field, field_b: &Field, newton_tol: f64) -> Result<EstimateCheck, EstimateError> {
    if field_a.values.len() != field_b.values.len() {
        return Err(EstimateError::GridMismatch);
    }
    let diff = field_a
        .values
        .iter()
        .zip(&field_b.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(EstimateCheck::upper("uniqueness", 0.0, diff, 2.0 * newton_tol))
}

/// All checks that apply to a converged solve.
pub fn estimate_report(
    domain: &Domain,
    outcome: &SolveOutcome,
    boundary_data: &dyn Fn(Vec2) -> f64,
    phi_samples: usize,
) -> Result<EstimateReport, EstimateError> {
    let grid = &outcome.grid;
    let field = &outcome.field;
    let params = outcome.params;
    let h = grid.h();
    let phi = boundary_data_range(domain, Some(grid), boundary_data, phi_samples)?;
    let mut checks = Vec::new();
    match params.signature {
        Signature::Euclidean => {
            checks.extend(check_height_euclidean(field, params.mean_curvature, phi, h));
            let zero_data = phi == (0.0, 0.0);
            if zero_data {
                if let Ok((_, bound)) = serrin_gradient_constant_for(domain, params.mean_curvature) {
                    let measured = outcome.max_du();
                    let tol = 5.0 * h * hessian_scale(grid, field);
                    checks.push(EstimateCheck::upper("serrin_gradient", bound, measured, tol));
                }
            }
        }
        Signature::Lorentzian => {
            let strips = domain.strip_stats(180);
            let (d, s) = check_height_lorentz(field, params.mean_curvature, phi, domain.diameter(), strips.min_width, h);
            checks.push(d);
            checks.push(s);
            checks.push(EstimateCheck::lower(
                "spacelike_margin",
                0.0,
                outcome.spacelike_margin(),
                0.0,
            ));
        }
    }
    checks.push(check_gradient_boundary_max(field, grid));
    Ok(EstimateReport {
        context: ReportContext {
            domain: domain.describe(),
            mean_curvature: params.mean_curvature,
            signature: params.signature,
            h,
        },
        checks,
    })
}
