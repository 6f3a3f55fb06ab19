//! Continuation in the mean curvature with damped Newton corrections, and the
//! geometric solvability predicates.
//!
//! The family `Q_t[u] = 0` with mean curvature `t·H` is followed from `t = 0`
//! to `t = 1`. At each accepted `t` Newton is run to the residual tolerance;
//! when Newton fails the `t` step is halved, and the run stops as stalled once
//! the step drops below `t_step_min`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discretization::{AssemblyError, DiscreteSystem, Field, Grid, GridError};
use crate::domain::{Domain, DomainError, Vec2, DEFAULT_BOUNDARY_SAMPLES};
use crate::linalg::{max_abs, LinalgError, SparseLuSolver};
use crate::mcoperator::{ellipticity_eigenvalues, grad_norm, McParams, Signature};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("invalid continuation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

/// Parameters of the continuation and of each Newton solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    /// Residual max-norm target; `None` means `1e-10 · max(1, |H|)`.
    pub newton_tol: Option<f64>,
    pub max_newton_iters: usize,
    pub t_step_init: f64,
    pub t_step_min: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Required spacelike margin `1 − max|Du| ≥ δ` (Lorentzian runs only).
    pub spacelike_delta: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            newton_tol: None,
            max_newton_iters: 50,
            t_step_init: 0.1,
            t_step_min: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 30,
            spacelike_delta: 1e-3,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.to_string()));
        if let Some(tol) = self.newton_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return bad("newton_tol must be positive");
            }
        }
        if !(self.t_step_min > 0.0 && self.t_step_min <= self.t_step_init && self.t_step_init <= 1.0) {
            return bad("need 0 < t_step_min <= t_step_init <= 1");
        }
        if !(self.spacelike_delta > 0.0 && self.spacelike_delta < 1.0) {
            return bad("spacelike_delta must lie in (0, 1)");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack_factor must lie in (0, 1)");
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be positive");
        }
        Ok(())
    }

    pub fn tolerance_for(&self, mean_curvature: f64) -> f64 {
        self.newton_tol
            .unwrap_or(1e-10 * mean_curvature.abs().max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceReason {
    GradientBlowUp,
    SpacelikeCollapse,
}

impl std::fmt::Display for DivergenceReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::GradientBlowUp => "gradient blow-up",
            Self::SpacelikeCollapse => "spacelike collapse",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    Stalled { t_reached: f64 },
    Diverged { t: f64, reason: DivergenceReason },
}

impl SolveStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, Self::Converged)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::Stalled { .. } => "stalled",
            Self::Diverged { .. } => "diverged",
        }
    }
}

/// State after a converged Newton solve at one value of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub t: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub max_du: f64,
    pub spacelike_margin: f64,
    /// Smallest ellipticity eigenvalue over the unknowns.
    pub min_lambda: f64,
}

/// One Newton iteration, accepted or not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub t: f64,
    pub iteration: usize,
    pub residual_norm: f64,
    pub step_norm: f64,
    pub damping: f64,
    pub backtracks: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Field at the last converged `t`.
    pub field: Field,
    pub grid: Grid,
    pub params: McParams,
    pub t_reached: f64,
    pub newton_tol: f64,
    pub diagnostics: Vec<StepDiagnostics>,
    pub iterations: Vec<IterationRecord>,
}

impl SolveOutcome {
    pub fn final_diagnostics(&self) -> Option<&StepDiagnostics> {
        self.diagnostics.last()
    }

    pub fn max_du(&self) -> f64 {
        self.grid
            .gradients(&self.field)
            .iter()
            .map(|&d| grad_norm(d))
            .fold(0.0, f64::max)
    }

    pub fn spacelike_margin(&self) -> f64 {
        1.0 - self.max_du()
    }
}

/// Result of one damped Newton step.
#[derive(Debug, Clone)]
pub struct NewtonStep {
    pub field: Field,
    pub step_norm: f64,
    pub residual_norm: f64,
    pub damping: f64,
    pub backtracks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NewtonFailure {
    Singular,
    NoDecrease,
    SpacelikeMargin,
    MaxIterations,
    GradientBlowUp,
}

/// Solves the CMC Dirichlet problem by continuation in `t`.
pub fn solve_dirichlet(
    domain: &Domain,
    mean_curvature: f64,
    signature: Signature,
    boundary_data: &dyn Fn(Vec2) -> f64,
    h: f64,
    config: &ContinuationConfig,
) -> Result<SolveOutcome, SolverError> {
    let grid = Grid::build(domain, h)?;
    solve_on_grid(grid, mean_curvature, signature, boundary_data, config)
}

/// As [`solve_dirichlet`], on a prebuilt grid.
pub fn solve_on_grid(
    grid: Grid,
    mean_curvature: f64,
    signature: Signature,
    boundary_data: &dyn Fn(Vec2) -> f64,
    config: &ContinuationConfig,
) -> Result<SolveOutcome, SolverError> {
    config.validate()?;
    let params = McParams::new(mean_curvature, signature);
    let tol = config.tolerance_for(mean_curvature);
    let lu = SparseLuSolver::new(grid.jacobian_pattern())?;
    let mut field = Field::with_boundary_data(&grid, boundary_data);
    if field.boundary_values.iter().any(|&v| v != 0.0) {
        // start from the harmonic lift; for zero data this is u ≡ 0
        let lift = grid.laplacian(&field);
        let rhs: Vec<f64> = lift.residual.iter().map(|v| -v).collect();
        field.values = lu.solve(&lift.jacobian, &rhs)?;
    }
    let mut diagnostics = Vec::new();
    let mut iterations = Vec::new();

    let run = |field: &Field, t: f64, iterations: &mut Vec<IterationRecord>| {
        newton_solve(&grid, &lu, field, &params, t, config, tol, iterations)
    };

    let finish = |status, field, t_reached, diagnostics, iterations, grid| SolveOutcome {
        status,
        field,
        grid,
        params,
        t_reached,
        newton_tol: tol,
        diagnostics,
        iterations,
    };

    match run(&field, 0.0, &mut iterations) {
        Ok((f, k, r)) => {
            diagnostics.push(step_diagnostics(&grid, &f, &params, 0.0, k, r));
            field = f;
        }
        Err(failure) => {
            let status = failure_status(failure, 0.0, signature);
            return Ok(finish(status, field, 0.0, diagnostics, iterations, grid));
        }
    }

    let mut t = 0.0;
    let mut dt = config.t_step_init;
    let mut last_failure = None;
    while t < 1.0 {
        let t_try = if t + dt >= 1.0 - 1e-12 { 1.0 } else { t + dt };
        match run(&field, t_try, &mut iterations) {
            Ok((f, k, r)) => {
                diagnostics.push(step_diagnostics(&grid, &f, &params, t_try, k, r));
                field = f;
                t = t_try;
                dt = (2.0 * dt).min(config.t_step_init);
            }
            Err(NewtonFailure::GradientBlowUp) => {
                let status = SolveStatus::Diverged {
                    t: t_try,
                    reason: DivergenceReason::GradientBlowUp,
                };
                return Ok(finish(status, field, t, diagnostics, iterations, grid));
            }
            Err(failure) => {
                last_failure = Some(failure);
                dt *= 0.5;
                if dt < config.t_step_min {
                    break;
                }
            }
        }
    }
    let status = if t >= 1.0 {
        SolveStatus::Converged
    } else {
        failure_status(last_failure.unwrap_or(NewtonFailure::NoDecrease), t, signature)
    };
    Ok(finish(status, field, t, diagnostics, iterations, grid))
}

fn failure_status(failure: NewtonFailure, t: f64, signature: Signature) -> SolveStatus {
    match failure {
        NewtonFailure::GradientBlowUp => SolveStatus::Diverged {
            t,
            reason: DivergenceReason::GradientBlowUp,
        },
        NewtonFailure::SpacelikeMargin if signature == Signature::Lorentzian => SolveStatus::Diverged {
            t,
            reason: DivergenceReason::SpacelikeCollapse,
        },
        _ => SolveStatus::Stalled { t_reached: t },
    }
}

fn step_diagnostics(
    grid: &Grid,
    field: &Field,
    params: &McParams,
    t: f64,
    newton_iters: usize,
    residual_norm: f64,
) -> StepDiagnostics {
    let grads = grid.gradients(field);
    let max_du = grads.iter().map(|&d| grad_norm(d)).fold(0.0, f64::max);
    let min_lambda = grads
        .iter()
        .map(|&d| ellipticity_eigenvalues(d, params.signature).0)
        .fold(f64::INFINITY, f64::min);
    StepDiagnostics {
        t,
        newton_iters,
        residual_norm,
        max_du,
        spacelike_margin: 1.0 - max_du,
        min_lambda,
    }
}

/// Newton at fixed `t`: returns the field, the iteration count and the final
/// residual norm.
#[allow(clippy::too_many_arguments)]
fn newton_solve(
    grid: &Grid,
    lu: &SparseLuSolver,
    start: &Field,
    params: &McParams,
    t: f64,
    config: &ContinuationConfig,
    tol: f64,
    log: &mut Vec<IterationRecord>,
) -> Result<(Field, usize, f64), NewtonFailure> {
    let mut field = start.clone();
    let mut system = grid
        .assemble(&field, params, t)
        .map_err(|_| NewtonFailure::SpacelikeMargin)?;
    for k in 0..=config.max_newton_iters {
        let r = max_abs(&system.residual);
        if r <= tol {
            return Ok((field, k, r));
        }
        if k == config.max_newton_iters {
            break;
        }
        let step = match newton_step(grid, lu, &system, &field, params, t, config) {
            Ok(step) => step,
            Err(f) => {
                log.push(IterationRecord {
                    t,
                    iteration: k,
                    residual_norm: r,
                    step_norm: f64::NAN,
                    damping: 0.0,
                    backtracks: config.max_backtracks,
                    accepted: false,
                });
                return Err(f.into());
            }
        };
        log.push(IterationRecord {
            t,
            iteration: k,
            residual_norm: step.residual_norm,
            step_norm: step.step_norm,
            damping: step.damping,
            backtracks: step.backtracks,
            accepted: true,
        });
        field = step.field;
        if params.signature == Signature::Euclidean {
            let max_du = grid
                .gradients(&field)
                .iter()
                .map(|&d| grad_norm(d))
                .fold(0.0, f64::max);
            if max_du > 1.0 / grid.h() {
                return Err(NewtonFailure::GradientBlowUp);
            }
        }
        system = grid
            .assemble(&field, params, t)
            .map_err(|_| NewtonFailure::SpacelikeMargin)?;
    }
    Err(NewtonFailure::MaxIterations)
}

/// One damped Newton step on an assembled system: solves
/// `J δ = −residual`, then backtracks until the residual max-norm decreases
/// and, in Lorentzian runs, `max|Du| ≤ 1 − δ` holds.
pub fn newton_step(
    grid: &Grid,
    lu: &SparseLuSolver,
    system: &DiscreteSystem,
    field: &Field,
    params: &McParams,
    t: f64,
    config: &ContinuationConfig,
) -> Result<NewtonStep, NewtonStepError> {
    let r0 = max_abs(&system.residual);
    let rhs: Vec<f64> = system.residual.iter().map(|v| -v).collect();
    let delta = lu
        .solve(&system.jacobian, &rhs)
        .map_err(|_| NewtonFailure::Singular)?;
    let step_norm = max_abs(&delta);
    let mut lambda = 1.0;
    let mut margin_rejected = false;
    for b in 0..=config.max_backtracks {
        let mut trial = field.clone();
        for (v, d) in trial.values.iter_mut().zip(&delta) {
            *v += lambda * d;
        }
        let margin_ok = params.signature == Signature::Euclidean
            || grid
                .gradients(&trial)
                .iter()
                .all(|&d| grad_norm(d) <= 1.0 - config.spacelike_delta);
        if !margin_ok {
            margin_rejected = true;
        } else if let Ok(res) = grid.residual(&trial, params, t) {
            let r = max_abs(&res);
            if r < r0 {
                return Ok(NewtonStep {
                    field: trial,
                    step_norm: lambda * step_norm,
                    residual_norm: r,
                    damping: lambda,
                    backtracks: b,
                });
            }
        }
        lambda *= config.backtrack_factor;
    }
    Err(if margin_rejected {
        NewtonFailure::SpacelikeMargin
    } else {
        NewtonFailure::NoDecrease
    }
    .into())
}

/// Why a single Newton step was rejected.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum NewtonStepError {
    #[error("singular linearization")]
    Singular,
    #[error("backtracking found no residual decrease")]
    NoDecrease,
    #[error("backtracking could not restore the spacelike margin")]
    SpacelikeMargin,
}

impl From<NewtonFailure> for NewtonStepError {
    fn from(f: NewtonFailure) -> Self {
        match f {
            NewtonFailure::Singular => Self::Singular,
            NewtonFailure::SpacelikeMargin => Self::SpacelikeMargin,
            _ => Self::NoDecrease,
        }
    }
}

impl From<NewtonStepError> for NewtonFailure {
    fn from(e: NewtonStepError) -> Self {
        match e {
            NewtonStepError::Singular => Self::Singular,
            NewtonStepError::NoDecrease => Self::NoDecrease,
            NewtonStepError::SpacelikeMargin => Self::SpacelikeMargin,
        }
    }
}

/// What the geometric hypotheses say about solvability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Exists,
    DoesNotExist,
    Unknown,
}

/// Which solvability hypotheses hold for `(Ω, H, ε)`. Flags report
/// hypotheses only; none of them asserts existence on its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub mean_curvature: f64,
    pub signature: Signature,
    /// `κ_min ≥ 2|H|`.
    pub serrin_ok: bool,
    /// `κ_min ≥ |H|`.
    pub t5_ok: bool,
    /// `|H| < L/(2A)` in Euclidean space; always true in Lorentzian space.
    pub necessary_ok: bool,
    /// A closed disk of radius `1/|H|` fits inside the domain.
    pub disk_obstruction: bool,
    /// `κ_min ≥ 0` and no reflex corner.
    pub lorentz_convex_ok: bool,
    /// Smooth boundary with a positive exterior circle radius.
    pub lorentz_smooth_ok: bool,
    /// Convex, and every minimal enclosing strip is narrower than `1/|H|`.
    pub strip_ok: bool,
    pub inradius_estimate: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub diameter: f64,
    pub area: f64,
    pub perimeter: f64,
    pub min_strip_width: f64,
    pub max_strip_width: f64,
    pub exterior_circle_radius: Option<f64>,
}

impl SolvabilityReport {
    pub fn prediction(&self) -> Prediction {
        match self.signature {
            Signature::Euclidean => {
                if !self.necessary_ok || self.disk_obstruction {
                    Prediction::DoesNotExist
                } else if self.t5_ok || self.strip_ok {
                    Prediction::Exists
                } else {
                    Prediction::Unknown
                }
            }
            Signature::Lorentzian => {
                if self.lorentz_smooth_ok || self.lorentz_convex_ok {
                    Prediction::Exists
                } else {
                    Prediction::Unknown
                }
            }
        }
    }
}

/// Evaluates the solvability hypotheses from the domain geometry.
pub fn solvability_predicates(
    domain: &Domain,
    mean_curvature: f64,
    signature: Signature,
) -> Result<SolvabilityReport, DomainError> {
    let abs_h = mean_curvature.abs();
    let curv = domain.curvature_range(DEFAULT_BOUNDARY_SAMPLES)?;
    let (area, perimeter) = domain.area_perimeter();
    let strips = domain.strip_stats(180);
    let inradius = domain.inradius_estimate();
    let exterior = if curv.is_smooth() {
        domain.exterior_circle_radius(DEFAULT_BOUNDARY_SAMPLES).ok()
    } else {
        None
    };
    let euclid = signature == Signature::Euclidean;
    let convex = curv.is_convex();
    Ok(SolvabilityReport {
        mean_curvature,
        signature,
        serrin_ok: curv.reflex_corners == 0 && curv.min >= 2.0 * abs_h,
        t5_ok: curv.reflex_corners == 0 && curv.min >= abs_h,
        necessary_ok: !euclid || abs_h < perimeter / (2.0 * area),
        disk_obstruction: euclid && abs_h > 0.0 && 1.0 / abs_h < inradius,
        lorentz_convex_ok: convex,
        lorentz_smooth_ok: curv.is_smooth() && exterior.is_some_and(|e| e > 0.0),
        strip_ok: convex && strips.max_min_width_over_directions * abs_h < 1.0,
        inradius_estimate: inradius,
        kappa_min: curv.min,
        kappa_max: curv.max,
        diameter: domain.diameter(),
        area,
        perimeter,
        min_strip_width: strips.min_width,
        max_strip_width: strips.max_min_width_over_directions,
        exterior_circle_radius: exterior,
    })
}
