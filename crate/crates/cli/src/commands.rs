//! The five commands. Each returns its exit code or an error.

use cmc_core::catalog::{integrate_profile, profile_family_limits};
use cmc_core::estimates::estimate_report;
use cmc_core::solver::{solvability_predicates, solve_dirichlet, Prediction, StepDiagnostics};
use cmc_core::{Domain, EstimateReport, ExactSurface, Signature, SolvabilityReport, SolveOutcome, SolveStatus, SurfaceKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::output::Writer;
use crate::spec::{parse_boundary_data, parse_domain, BoundaryData};

fn predicates(domain: &Domain, h: f64, sig: Signature) -> Option<SolvabilityReport> {
    match solvability_predicates(domain, h, sig) {
        Ok(r) => Some(r),
        Err(e) => {
            eprintln!("warning kind=predicates reason={:?}", e.to_string());
            None
        }
    }
}

fn prediction_of(report: Option<&SolvabilityReport>) -> Prediction {
    report.map_or(Prediction::Unknown, |r| r.prediction())
}

/// 0 when converged, 2 when a failure was predicted, 1 otherwise.
fn solve_exit_code(status: &SolveStatus, prediction: Prediction) -> i32 {
    match (status, prediction) {
        (SolveStatus::Converged, _) => exit::OK,
        (_, Prediction::DoesNotExist) => exit::PREDICTED_FAILURE,
        _ => exit::UNEXPECTED,
    }
}

#[derive(Serialize)]
struct OutcomeDoc<'a> {
    domain: String,
    signature: Signature,
    #[serde(rename = "H")]
    mean_curvature: f64,
    h: f64,
    status: SolveStatus,
    t_reached: f64,
    newton_tol: f64,
    sup_u: f64,
    max_du: f64,
    spacelike_margin: f64,
    prediction: Prediction,
    predicates: Option<&'a SolvabilityReport>,
    diagnostics: &'a [StepDiagnostics],
}

struct Solved {
    domain: Domain,
    data: BoundaryData,
    outcome: SolveOutcome,
    predicates: Option<SolvabilityReport>,
    writer: Writer,
}

fn run_solve(cfg: &RunConfig) -> Result<Solved, CliError> {
    let domain = parse_domain(&cfg.domain)?;
    let data = parse_boundary_data(&cfg.boundary_data)?;
    let preds = predicates(&domain, cfg.mean_curvature, cfg.signature);
    let outcome = solve_dirichlet(
        &domain,
        cfg.mean_curvature,
        cfg.signature,
        &|p| data.eval(p),
        cfg.h,
        &cfg.continuation,
    )
    .map_err(|e| match e {
        cmc_core::solver::SolverError::Grid(g) => CliError::Config(g.to_string()),
        other => CliError::Solver(other.to_string()),
    })?;
    let writer = Writer::new(&cfg.out, cfg.hash())?.with_grid(outcome.grid.metadata());

    writer.write("field.csv", outcome.grid.field_csv(&outcome.field).as_bytes())?;
    let doc = OutcomeDoc {
        domain: domain.describe(),
        signature: cfg.signature,
        mean_curvature: cfg.mean_curvature,
        h: cfg.h,
        status: outcome.status,
        t_reached: outcome.t_reached,
        newton_tol: outcome.newton_tol,
        sup_u: outcome.field.sup_abs(),
        max_du: outcome.max_du(),
        spacelike_margin: outcome.spacelike_margin(),
        prediction: prediction_of(preds.as_ref()),
        predicates: preds.as_ref(),
        diagnostics: &outcome.diagnostics,
    };
    writer.write_json("outcome.json", &doc)?;
    let mut log = String::new();
    for it in &outcome.iterations {
        log.push_str(&serde_json::to_string(it).expect("records serialize"));
        log.push('\n');
    }
    writer.write("diagnostics.jsonl", log.as_bytes())?;
    writer.write("effective_config.toml", cfg.to_toml().as_bytes())?;
    println!(
        "status={} t_reached={} sup_u={:.6} max_du={:.6} prediction={}",
        outcome.status.label(),
        outcome.t_reached,
        doc.sup_u,
        doc.max_du,
        serde_json::to_value(doc.prediction).unwrap().as_str().unwrap_or("unknown"),
    );
    Ok(Solved {
        domain,
        data,
        outcome,
        predicates: preds,
        writer,
    })
}

pub fn solve(cfg: &RunConfig) -> Result<i32, CliError> {
    let s = run_solve(cfg)?;
    Ok(solve_exit_code(&s.outcome.status, prediction_of(s.predicates.as_ref())))
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    status: SolveStatus,
    all_pass: bool,
    #[serde(flatten)]
    report: &'a EstimateReport,
}

pub fn verify(cfg: &RunConfig) -> Result<i32, CliError> {
    let s = run_solve(cfg)?;
    let prediction = prediction_of(s.predicates.as_ref());
    if !s.outcome.status.is_converged() {
        return Ok(solve_exit_code(&s.outcome.status, prediction));
    }
    let report = estimate_report(&s.domain, &s.outcome, &|p| s.data.eval(p), cfg.phi_samples)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let pass = report.is_valid() && report.all_pass();
    s.writer.write_json(
        "report.json",
        &ReportDoc {
            status: s.outcome.status,
            all_pass: pass,
            report: &report,
        },
    )?;
    for c in &report.checks {
        println!(
            "check={} pass={} bound={:.6e} measured={:.6e} slack={:.3e} tol={:.3e}",
            c.name, c.pass, c.bound, c.measured, c.slack, c.tol
        );
    }
    Ok(if pass { exit::OK } else { exit::UNEXPECTED })
}

#[derive(Serialize)]
struct PredicatesDoc {
    domain: String,
    prediction: Prediction,
    #[serde(flatten)]
    report: SolvabilityReport,
}

pub fn predicates_cmd(cfg: &RunConfig) -> Result<i32, CliError> {
    let domain = parse_domain(&cfg.domain)?;
    let report = solvability_predicates(&domain, cfg.mean_curvature, cfg.signature)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let writer = Writer::new(&cfg.out, cfg.hash())?;
    let doc = PredicatesDoc {
        domain: domain.describe(),
        prediction: report.prediction(),
        report,
    };
    writer.write_json("predicates.json", &doc)?;
    println!("{}", serde_json::to_string(&doc).expect("report serializes"));
    Ok(exit::OK)
}

fn catalog_surfaces(h: f64) -> Result<Vec<(&'static str, ExactSurface)>, CliError> {
    let a = h.abs();
    let kinds = [
        ("euclidean_cap", SurfaceKind::EuclideanCap { mean_curvature: h, rho: (0.9 / a).min(1.0) }),
        ("lorentz_cap", SurfaceKind::LorentzCap { mean_curvature: h, rho: 1.0 }),
        ("euclidean_cylinder", SurfaceKind::EuclideanCylinder { mean_curvature: h, half_width: 0.45 / a }),
        ("lorentz_cylinder", SurfaceKind::LorentzCylinder { mean_curvature: h }),
        ("hyperbolic_plane", SurfaceKind::HyperbolicPlane { mean_curvature: h }),
    ];
    kinds
        .into_iter()
        .map(|(name, k)| {
            ExactSurface::new(k, 0.0)
                .map(|s| (name, s))
                .map_err(|e| CliError::Config(e.to_string()))
        })
        .collect()
}

pub fn catalog(cfg: &RunConfig) -> Result<i32, CliError> {
    let h = cfg.mean_curvature;
    if h == 0.0 {
        return Err(CliError::Config("catalog needs H != 0".into()));
    }
    let writer = Writer::new(&cfg.out, cfg.hash())?;
    let surfaces = catalog_surfaces(h)?;
    for (name, s) in &surfaces {
        writer.write(&format!("catalog_{name}.csv"), s.table_csv(cfg.catalog.samples).as_bytes())?;
    }
    let listing: Vec<_> = surfaces
        .iter()
        .map(|(name, s)| serde_json::json!({ "name": name, "surface": s }))
        .collect();
    writer.write_json("catalog.json", &serde_json::json!({ "surfaces": listing }))?;

    let bad = |e: cmc_core::catalog::CatalogError| CliError::Config(e.to_string());
    let c = cfg.catalog.profile_c;
    let r0 = (-c / h.abs()).sqrt();
    let profile = integrate_profile(h.abs(), c, 1e-4 * r0).map_err(bad)?;
    writer.write("profile.csv", profile.to_csv().as_bytes())?;
    let rows = profile_family_limits(h.abs(), &cfg.catalog.family_c).map_err(bad)?;
    let mut table = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        table.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = table.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    writer.write("family.csv", &bytes)?;
    println!(
        "surfaces={} profile_r0={} xi={:.6}",
        surfaces.len(),
        profile.r0,
        profile.xi_estimate
    );
    Ok(exit::OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    pub signature: &'static str,
    pub status: &'static str,
    pub sup_u: f64,
    pub max_du: f64,
    pub diam_bound_slack: Option<f64>,
    pub strip_bound_slack: Option<f64>,
    pub domain: String,
    pub t_reached: f64,
    pub prediction: Prediction,
    pub consistent: bool,
    pub error: Option<String>,
}

fn sweep_row(cfg: &RunConfig, domain_spec: &str, h: f64, sig: Signature) -> SweepRow {
    let mut row = SweepRow {
        mean_curvature: h,
        signature: sig.name(),
        status: "error",
        sup_u: f64::NAN,
        max_du: f64::NAN,
        diam_bound_slack: None,
        strip_bound_slack: None,
        domain: domain_spec.to_string(),
        t_reached: 0.0,
        prediction: Prediction::Unknown,
        consistent: false,
        error: None,
    };
    let result = (|| -> Result<(), CliError> {
        let domain = parse_domain(domain_spec)?;
        let data = parse_boundary_data(&cfg.boundary_data)?;
        row.prediction = prediction_of(predicates(&domain, h, sig).as_ref());
        let o = solve_dirichlet(&domain, h, sig, &|p| data.eval(p), cfg.h, &cfg.continuation)
            .map_err(|e| CliError::Solver(e.to_string()))?;
        row.status = o.status.label();
        row.t_reached = o.t_reached;
        row.sup_u = o.field.sup_abs();
        row.max_du = o.max_du();
        if o.status.is_converged() {
            let report = estimate_report(&domain, &o, &|p| data.eval(p), cfg.phi_samples)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            row.diam_bound_slack = report.check("height_lorentz_diameter").map(|c| c.slack);
            row.strip_bound_slack = report.check("height_lorentz_strip").map(|c| c.slack);
        }
        row.consistent = match row.prediction {
            Prediction::Exists => o.status.is_converged(),
            Prediction::DoesNotExist => !o.status.is_converged(),
            Prediction::Unknown => true,
        };
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

pub fn sweep_rows(cfg: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
    let hs = or(&cfg.sweep.mean_curvatures, cfg.mean_curvature);
    let sigs = if cfg.sweep.signatures.is_empty() {
        vec![cfg.signature]
    } else {
        cfg.sweep.signatures.clone()
    };
    let domains = if cfg.sweep.domains.is_empty() {
        vec![cfg.domain.clone()]
    } else {
        cfg.sweep.domains.clone()
    };
    let mut tuples = Vec::new();
    for d in &domains {
        for &s in &sigs {
            for &h in &hs {
                tuples.push((d.clone(), h, s));
            }
        }
    }
    let jobs = cfg
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Solver(e.to_string()))?;
    Ok(pool.install(|| {
        tuples
            .par_iter()
            .map(|(d, h, s)| sweep_row(cfg, d, *h, *s))
            .collect()
    }))
}

pub fn sweep(cfg: &RunConfig) -> Result<i32, CliError> {
    let rows = sweep_rows(cfg)?;
    let writer = Writer::new(&cfg.out, cfg.hash())?;
    let mut table = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        table.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = table.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    writer.write("sweep.csv", &bytes)?;
    writer.write("effective_config.toml", cfg.to_toml().as_bytes())?;
    for r in &rows {
        println!(
            "domain={} H={} signature={} status={} consistent={}",
            r.domain, r.mean_curvature, r.signature, r.status, r.consistent
        );
    }
    Ok(if rows.iter().all(|r| r.consistent && r.error.is_none()) {
        exit::OK
    } else {
        exit::UNEXPECTED
    })
}
