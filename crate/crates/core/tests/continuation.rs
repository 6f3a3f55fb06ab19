use cmc_core::estimates::{check_comparison_pair, estimate_report};
use cmc_core::mcoperator::q_residual;
use cmc_core::solver::solve_dirichlet;
use cmc_core::{ContinuationConfig, Domain, ExactSurface, Field, Grid, McParams, Signature, SolveStatus, SurfaceKind, Vec2};

const H: f64 = 1.0 / 32.0;

fn zero(_: Vec2) -> f64 {
    0.0
}

#[test]
fn converged_means_t_one_and_small_residual() {
    let cfg = ContinuationConfig::default();
    for sig in [Signature::Euclidean, Signature::Lorentzian] {
        let o = solve_dirichlet(&Domain::unit_disk(), 0.5, sig, &zero, H, &cfg).unwrap();
        assert_eq!(o.status, SolveStatus::Converged);
        assert_eq!(o.t_reached, 1.0);
        let r = o.grid.residual(&o.field, &o.params, 1.0).unwrap();
        assert!(r.iter().all(|v| v.abs() <= o.newton_tol));
        // zero data, H > 0: the graph lies below its boundary
        assert!(o.field.max() <= 1e-8);
    }
}

#[test]
fn lorentz_iterates_keep_the_margin() {
    let cfg = ContinuationConfig::default();
    let star = Domain::polar_star(1.0, 0.3, 5).unwrap();
    let o = solve_dirichlet(&star, 1.0, Signature::Lorentzian, &zero, H, &cfg).unwrap();
    assert!(o.status.is_converged());
    assert!(o.diagnostics.iter().all(|d| d.spacelike_margin >= cfg.spacelike_delta));
    assert!(o.diagnostics.iter().all(|d| d.min_lambda > 0.0));
    let report = estimate_report(&star, &o, &zero, 1024).unwrap();
    assert!(report.is_valid() && report.all_pass(), "{report:?}");
}

#[test]
fn larger_mean_curvature_gives_lower_graph() {
    let cfg = ContinuationConfig::default();
    let disk = Domain::unit_disk();
    let a = solve_dirichlet(&disk, 0.2, Signature::Euclidean, &zero, H, &cfg).unwrap();
    let b = solve_dirichlet(&disk, 0.4, Signature::Euclidean, &zero, H, &cfg).unwrap();
    assert!(check_comparison_pair(&a.field, 0.2, &b.field, 0.4).unwrap().pass);
}

#[test]
fn nonzero_boundary_data_is_matched_by_the_cap() {
    // a cap of radius 1/H over a smaller disk, offset vertically
    let cap = ExactSurface::new(SurfaceKind::EuclideanCap { mean_curvature: 0.5, rho: 1.5 }, 0.2).unwrap();
    let phi = |p: Vec2| cap.value(p).unwrap();
    let cfg = ContinuationConfig::default();
    let o = solve_dirichlet(&Domain::unit_disk(), 0.5, Signature::Euclidean, &phi, H, &cfg).unwrap();
    assert!(o.status.is_converged());
    let err = (0..o.grid.num_unknowns())
        .map(|u| (o.field.values[u] - phi(o.grid.position(u))).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "max error {err:e}");
}

#[test]
fn lorentz_cap_residual_converges() {
    let cap = ExactSurface::new(SurfaceKind::LorentzCap { mean_curvature: 0.5, rho: 1.0 }, 0.0).unwrap();
    let params = McParams::new(cap.signed_h, Signature::Lorentzian);
    let max_res = |h: f64| {
        let g = Grid::build(&Domain::unit_disk(), h).unwrap();
        let f = Field::from_fn(&g, &|p| cap.value(p).unwrap_or(0.0));
        let r = g.residual(&f, &params, 1.0).unwrap();
        let nx = g.dims().0;
        (0..g.num_unknowns())
            .filter(|&u| {
                let k = g.node_of_unknown(u);
                [k - nx - 1, k - nx, k - nx + 1, k - 1, k + 1, k + nx - 1, k + nx, k + nx + 1]
                    .iter()
                    .all(|&nb| g.unknown_of_node(nb).is_some())
            })
            .map(|u| r[u].abs())
            .fold(0.0, f64::max)
    };
    let r = [max_res(1.0 / 16.0), max_res(1.0 / 32.0), max_res(1.0 / 64.0)];
    for w in r.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.5, "{r:?}");
    }
    // the closed form itself is exact
    let jet = cap.jet(Vec2::new(0.3, -0.4)).unwrap();
    assert!(q_residual(&jet, &params).unwrap().abs() < 1e-12);
}
