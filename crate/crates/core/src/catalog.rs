//! Exact CMC graphs (caps, cylinders, hyperbolic planes) and the rotational
//! spacelike family `S(c)` with first integral
//! `H r² + c = r w′ / √(1 − w′²)`.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{Domain, DomainError, Vec2, DEFAULT_BOUNDARY_SAMPLES};
use crate::mcoperator::{q_residual, Jet, McParams, Signature, SymMat2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("invalid surface parameters: {0}")]
    InvalidParameter(String),
    #[error("point ({x:.6}, {y:.6}) lies outside the surface's domain")]
    OutOfDomain { x: f64, y: f64 },
    #[error("no barrier found after {0} doublings of c")]
    BarrierNotFound(usize),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// Lower spherical cap over the disk of radius `rho`, zero on its rim.
    EuclideanCap { mean_curvature: f64, rho: f64 },
    /// Hyperbolic cap over the disk of radius `rho`, zero on its rim.
    LorentzCap { mean_curvature: f64, rho: f64 },
    /// Lower half cylinder of radius `1/(2|H|)` over `|x₁| ≤ half_width`.
    EuclideanCylinder { mean_curvature: f64, half_width: f64 },
    /// `√(r² + x₁²)` with `r = 1/(2|H|)`, entire.
    LorentzCylinder { mean_curvature: f64 },
    /// `√(1/H² + |x|²)`, entire.
    HyperbolicPlane { mean_curvature: f64 },
}

impl SurfaceKind {
    pub fn signature(&self) -> Signature {
        match self {
            Self::EuclideanCap { .. } | Self::EuclideanCylinder { .. } => Signature::Euclidean,
            _ => Signature::Lorentzian,
        }
    }

    fn mean_curvature(&self) -> f64 {
        match *self {
            Self::EuclideanCap { mean_curvature, .. }
            | Self::LorentzCap { mean_curvature, .. }
            | Self::EuclideanCylinder { mean_curvature, .. }
            | Self::LorentzCylinder { mean_curvature }
            | Self::HyperbolicPlane { mean_curvature } => mean_curvature,
        }
    }
}

/// A closed-form CMC graph with its numerically fixed orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactSurface {
    pub kind: SurfaceKind,
    /// The mean curvature at which the residual of this graph vanishes.
    pub signed_h: f64,
    pub vertical_offset: f64,
}

impl ExactSurface {
    pub fn new(kind: SurfaceKind, vertical_offset: f64) -> Result<Self, CatalogError> {
        let h = kind.mean_curvature();
        let bad = |m: &str| Err(CatalogError::InvalidParameter(m.to_string()));
        if !(h.is_finite() && h != 0.0) || !vertical_offset.is_finite() {
            return bad("mean curvature must be finite and nonzero");
        }
        match kind {
            SurfaceKind::EuclideanCap { rho, .. } if !(rho > 0.0 && rho < 1.0 / h.abs()) => {
                return bad("EuclideanCap needs 0 < rho < 1/|H|")
            }
            SurfaceKind::LorentzCap { rho, .. } if !(rho > 0.0 && rho.is_finite()) => {
                return bad("LorentzCap needs rho > 0")
            }
            SurfaceKind::EuclideanCylinder { half_width, .. }
                if !(half_width > 0.0 && half_width < 0.5 / h.abs()) =>
            {
                return bad("EuclideanCylinder needs 0 < half_width < 1/(2|H|)")
            }
            _ => {}
        }
        let mut surface = Self {
            kind,
            signed_h: h.abs(),
            vertical_offset,
        };
        // orientation: keep the sign whose residual vanishes at a probe point
        let probe = surface.sample_point([0.37, 0.21]);
        let jet = surface.jet(probe)?;
        let res = |hh: f64| {
            q_residual(&jet, &McParams::new(hh, kind.signature()))
                .expect("catalog jets are spacelike")
                .abs()
        };
        if res(-h.abs()) < res(h.abs()) {
            surface.signed_h = -h.abs();
        }
        Ok(surface)
    }

    pub fn signature(&self) -> Signature {
        self.kind.signature()
    }

    pub fn params(&self) -> McParams {
        McParams::new(self.signed_h, self.signature())
    }

    /// Maps `s ∈ [0,1]²` into the surface's domain of definition: the open
    /// cap disk, the cylinder strip (with `|x₂| ≤ 1`), or the box
    /// `[−3/|H|, 3/|H|]²` for entire graphs.
    pub fn sample_point(&self, s: [f64; 2]) -> Vec2 {
        let disk = |rho: f64| Vec2::from_angle(2.0 * std::f64::consts::PI * s[1]) * (0.999 * rho * s[0].sqrt());
        match self.kind {
            SurfaceKind::EuclideanCap { rho, .. } | SurfaceKind::LorentzCap { rho, .. } => disk(rho),
            SurfaceKind::EuclideanCylinder { half_width, .. } => {
                Vec2::new(0.999 * half_width * (2.0 * s[0] - 1.0), 2.0 * s[1] - 1.0)
            }
            SurfaceKind::LorentzCylinder { mean_curvature } | SurfaceKind::HyperbolicPlane { mean_curvature } => {
                let l = 3.0 / mean_curvature.abs();
                Vec2::new(l * (2.0 * s[0] - 1.0), l * (2.0 * s[1] - 1.0))
            }
        }
    }

    fn out_of_domain(p: Vec2) -> CatalogError {
        CatalogError::OutOfDomain { x: p.x, y: p.y }
    }

    /// Height of the graph at `p`.
    pub fn value(&self, p: Vec2) -> Result<f64, CatalogError> {
        Ok(self.jet(p)?.u)
    }

    /// `(u, Du, D²u)` at `p`.
    pub fn jet(&self, p: Vec2) -> Result<Jet, CatalogError> {
        let off = self.vertical_offset;
        let r2 = p.norm_sq();
        let jet = match self.kind {
            SurfaceKind::EuclideanCap { mean_curvature, rho } => {
                if r2 > rho * rho {
                    return Err(Self::out_of_domain(p));
                }
                let big = 1.0 / (mean_curvature * mean_curvature);
                let s = (big - r2).sqrt();
                let s3 = s * s * s;
                Jet::new(
                    (big - rho * rho).sqrt() - s + off,
                    [p.x / s, p.y / s],
                    SymMat2::new(1.0 / s + p.x * p.x / s3, p.x * p.y / s3, 1.0 / s + p.y * p.y / s3),
                )
            }
            SurfaceKind::LorentzCap { mean_curvature, rho } => {
                let big = 1.0 / (mean_curvature * mean_curvature);
                if r2 > rho * rho {
                    return Err(Self::out_of_domain(p));
                }
                let mut jet = hyperbolic_jet(big, p);
                jet.u -= (big + rho * rho).sqrt();
                jet.u += off;
                jet
            }
            SurfaceKind::HyperbolicPlane { mean_curvature } => {
                let mut jet = hyperbolic_jet(1.0 / (mean_curvature * mean_curvature), p);
                jet.u += off;
                jet
            }
            SurfaceKind::EuclideanCylinder { mean_curvature, half_width } => {
                if p.x.abs() > half_width {
                    return Err(Self::out_of_domain(p));
                }
                let r = 0.5 / mean_curvature.abs();
                let s = (r * r - p.x * p.x).sqrt();
                Jet::new(-s + off, [p.x / s, 0.0], SymMat2::new(r * r / (s * s * s), 0.0, 0.0))
            }
            SurfaceKind::LorentzCylinder { mean_curvature } => {
                let r = 0.5 / mean_curvature.abs();
                let s = (r * r + p.x * p.x).sqrt();
                Jet::new(s + off, [p.x / s, 0.0], SymMat2::new(r * r / (s * s * s), 0.0, 0.0))
            }
        };
        Ok(jet)
    }

    /// `(x, y, u)` table over an `n × n` sampling of the domain of definition.
    pub fn table_csv(&self, n: usize) -> String {
        let mut out = String::from("x,y,u\n");
        let n = n.max(2);
        for i in 0..n {
            for j in 0..n {
                let s = [i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64];
                let p = self.sample_point(s);
                if let Ok(u) = self.value(p) {
                    out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", p.x, p.y, u));
                }
            }
        }
        out
    }
}

/// `√(R² + |p|²)` and its derivatives.
fn hyperbolic_jet(big: f64, p: Vec2) -> Jet {
    let s = (big + p.norm_sq()).sqrt();
    let s3 = s * s * s;
    Jet::new(
        s,
        [p.x / s, p.y / s],
        SymMat2::new(1.0 / s - p.x * p.x / s3, -p.x * p.y / s3, 1.0 / s - p.y * p.y / s3),
    )
}

/// Height of a zero-rim cap at `p`.
pub fn cap_value(kind: SurfaceKind, p: Vec2) -> Result<f64, CatalogError> {
    ExactSurface::new(kind, 0.0)?.value(p)
}

/// Height of a cylinder graph at `p`.
pub fn cylinder_value(kind: SurfaceKind, p: Vec2) -> Result<f64, CatalogError> {
    ExactSurface::new(kind, 0.0)?.value(p)
}

/// Rotational spacelike graph `u(x) = w(|x|)` of the family `S(c)`, `c < 0`,
/// normalised by `w(r₀) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationalProfile {
    pub mean_curvature: f64,
    pub c: f64,
    pub r0: f64,
    /// Increasing radii on `[r_min, r0]`.
    pub r_values: Vec<f64>,
    pub w_values: Vec<f64>,
    /// Extrapolated `lim_{r→0} w(r)`.
    pub xi_estimate: f64,
}

impl RotationalProfile {
    fn g(&self, r: f64) -> f64 {
        self.mean_curvature * r * r + self.c
    }

    /// `w′(r)`.
    pub fn slope(&self, r: f64) -> f64 {
        profile_slope(self.mean_curvature, self.c, r)
    }

    /// `w″(r)`.
    pub fn curvature(&self, r: f64) -> f64 {
        let g = self.g(r);
        let dg = 2.0 * self.mean_curvature * r;
        (dg * r * r - g * r) / (r * r + g * g).powf(1.5)
    }

    pub fn r_min(&self) -> f64 {
        self.r_values[0]
    }

    /// `w(r)` on `[r_min, r0]`, linear between stored nodes.
    pub fn value(&self, r: f64) -> Option<f64> {
        let rs = &self.r_values;
        if !(r >= rs[0] && r <= *rs.last()?) {
            return None;
        }
        let k = rs.partition_point(|&x| x <= r).clamp(1, rs.len() - 1);
        let (r_a, r_b) = (rs[k - 1], rs[k]);
        let f = if r_b > r_a { (r - r_a) / (r_b - r_a) } else { 0.0 };
        Some(self.w_values[k - 1] * (1.0 - f) + self.w_values[k] * f)
    }

    /// Jet of `x ↦ w(|x|)` at `p`, for `r_min ≤ |p| ≤ r0`.
    pub fn jet(&self, p: Vec2) -> Option<Jet> {
        let r = p.norm();
        let u = self.value(r)?;
        let (d1, d2) = (self.slope(r), self.curvature(r));
        let (ex, ey) = (p.x / r, p.y / r);
        let t = d1 / r;
        Some(Jet::new(
            u,
            [d1 * ex, d1 * ey],
            SymMat2::new(
                d2 * ex * ex + t * (1.0 - ex * ex),
                (d2 - t) * ex * ey,
                d2 * ey * ey + t * (1.0 - ey * ey),
            ),
        ))
    }

    /// `H r² + c − r w′/√(1 − w′²)` at every stored node.
    pub fn first_integral_defects(&self) -> Vec<f64> {
        self.r_values
            .iter()
            .map(|&r| {
                let d = self.slope(r);
                self.g(r) - r * d / (1.0 - d * d).sqrt()
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,w\n");
        for (r, w) in self.r_values.iter().zip(&self.w_values) {
            out.push_str(&format!("{r:.17e},{w:.17e}\n"));
        }
        out
    }
}

fn profile_slope(h: f64, c: f64, r: f64) -> f64 {
    let g = h * r * r + c;
    g / (r * r + g * g).sqrt()
}

fn check_profile_params(h: f64, c: f64) -> Result<f64, CatalogError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(CatalogError::InvalidParameter("profiles need H > 0".into()));
    }
    if !(c < 0.0 && c.is_finite()) {
        return Err(CatalogError::InvalidParameter(
            "profiles need c < 0; c = 0 is the hyperbolic plane".into(),
        ));
    }
    Ok((-c / h).sqrt())
}

/// Radii from `r0` down to `r_min` with base step `(r0 − r_min)/2000`,
/// halved where `|w′| > 0.99`, and `w` by Simpson quadrature of `w′`.
fn integrate_down(h: f64, c: f64, r0: f64, r_min: f64) -> (Vec<f64>, Vec<f64>) {
    let base = (r0 - r_min) / 2000.0;
    let mut rs = vec![r0];
    let mut ws = vec![0.0];
    let mut r = r0;
    let mut w = 0.0;
    while r > r_min {
        let mut step = base;
        if profile_slope(h, c, r).abs() > 0.99 {
            step *= 0.5;
        }
        let next = if r - step <= r_min + 1e-3 * step { r_min } else { r - step };
        let s = r - next;
        let mid = 0.5 * (r + next);
        // w(next) = w(r) − ∫_next^r w′
        w -= s / 6.0 * (profile_slope(h, c, r) + 4.0 * profile_slope(h, c, mid) + profile_slope(h, c, next));
        r = next;
        rs.push(r);
        ws.push(w);
    }
    rs.reverse();
    ws.reverse();
    (rs, ws)
}

/// `lim_{r→0} w(r)` by extrapolation of `w` at `r ∈ {1e-2, 1e-3, 1e-4}·r0`,
/// with the order estimated from the three samples.
fn extrapolate_xi(h: f64, c: f64, r0: f64) -> f64 {
    let w = |f: f64| {
        let (_, ws) = integrate_down(h, c, r0, f * r0);
        ws[0]
    };
    let (w1, w2, w3) = (w(1e-2), w(1e-3), w(1e-4));
    let ratio = (w1 - w2) / (w2 - w3);
    let factor = if ratio.is_finite() && ratio > 1.0 { ratio } else { 10.0 };
    w3 + (w3 - w2) / (factor - 1.0)
}

/// Integrates the rotational profile with parameters `(H, c)` from `r0`
/// down to `r_min`.
pub fn integrate_profile(h: f64, c: f64, r_min: f64) -> Result<RotationalProfile, CatalogError> {
    let r0 = check_profile_params(h, c)?;
    if !(r_min > 0.0 && r_min < r0) {
        return Err(CatalogError::InvalidParameter(format!(
            "need 0 < r_min < r0 = {r0}"
        )));
    }
    let (r_values, w_values) = integrate_down(h, c, r0, r_min);
    Ok(RotationalProfile {
        mean_curvature: h,
        c,
        r0,
        r_values,
        w_values,
        xi_estimate: extrapolate_xi(h, c, r0),
    })
}

/// One row of the family table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyRow {
    pub c: f64,
    pub r0: f64,
    pub xi_estimate: f64,
}

pub fn profile_family_limits(h: f64, c_list: &[f64]) -> Result<Vec<FamilyRow>, CatalogError> {
    c_list
        .iter()
        .map(|&c| {
            let r0 = check_profile_params(h, c)?;
            Ok(FamilyRow {
                c,
                r0,
                xi_estimate: extrapolate_xi(h, c, r0),
            })
        })
        .collect()
}

/// Maximum number of doublings of `c` tried by [`barrier_for_domain`].
pub const MAX_BARRIER_DOUBLINGS: usize = 60;

/// A profile with `r0 > diam(Ω)` and `w(ε) > K`, where `ε` is the exterior
/// circle radius of the domain; `c` starts at −1 and doubles.
pub fn barrier_for_domain(
    domain: &Domain,
    h: f64,
    height_bound: f64,
) -> Result<RotationalProfile, CatalogError> {
    if !(height_bound > 0.0) {
        return Err(CatalogError::InvalidParameter("height bound must be positive".into()));
    }
    check_profile_params(h, -1.0)?;
    let eps = domain.exterior_circle_radius(DEFAULT_BOUNDARY_SAMPLES)?;
    let diam = domain.diameter();
    let mut c = -1.0;
    for _ in 0..=MAX_BARRIER_DOUBLINGS {
        let r0 = (-c / h).sqrt();
        if r0 > diam && eps < r0 {
            let profile = integrate_profile(h, c, eps)?;
            if profile.w_values[0] > height_bound {
                return Ok(profile);
            }
        }
        c *= 2.0;
    }
    Err(CatalogError::BarrierNotFound(MAX_BARRIER_DOUBLINGS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn surfaces() -> Vec<ExactSurface> {
        [
            SurfaceKind::EuclideanCap { mean_curvature: 0.5, rho: 1.0 },
            SurfaceKind::EuclideanCap { mean_curvature: -1.3, rho: 0.5 },
            SurfaceKind::LorentzCap { mean_curvature: 0.5, rho: 1.0 },
            SurfaceKind::LorentzCap { mean_curvature: -2.0, rho: 3.0 },
            SurfaceKind::EuclideanCylinder { mean_curvature: 0.5, half_width: 0.5 },
            SurfaceKind::LorentzCylinder { mean_curvature: 0.5 },
            SurfaceKind::HyperbolicPlane { mean_curvature: 1.5 },
        ]
        .into_iter()
        .map(|k| ExactSurface::new(k, 0.0).unwrap())
        .collect()
    }

    #[test]
    fn cap_examples() {
        let e = SurfaceKind::EuclideanCap { mean_curvature: 0.5, rho: 1.0 };
        assert_abs_diff_eq!(cap_value(e, Vec2::ZERO).unwrap(), 3f64.sqrt() - 2.0, epsilon = 1e-15);
        let l = SurfaceKind::LorentzCap { mean_curvature: 0.5, rho: 1.0 };
        assert_abs_diff_eq!(cap_value(l, Vec2::ZERO).unwrap(), 2.0 - 5f64.sqrt(), epsilon = 1e-15);
        for k in [e, l] {
            assert_abs_diff_eq!(cap_value(k, Vec2::new(0.6, 0.8)).unwrap(), 0.0, epsilon = 1e-15);
            assert!(cap_value(k, Vec2::new(1.1, 0.0)).is_err());
        }
        assert!(ExactSurface::new(SurfaceKind::EuclideanCap { mean_curvature: 1.2, rho: 1.0 }, 0.0).is_err());
    }

    #[test]
    fn cylinder_examples() {
        let l = SurfaceKind::LorentzCylinder { mean_curvature: 0.5 };
        assert_abs_diff_eq!(cylinder_value(l, Vec2::new(0.0, 7.0)).unwrap(), 1.0, epsilon = 1e-15);
        let e = SurfaceKind::EuclideanCylinder { mean_curvature: 0.5, half_width: 0.5 };
        assert_abs_diff_eq!(cylinder_value(e, Vec2::new(0.0, -3.0)).unwrap(), -1.0, epsilon = 1e-15);
        for k in [l, e] {
            let a = cylinder_value(k, Vec2::new(0.3, -2.0)).unwrap();
            let b = cylinder_value(k, Vec2::new(0.3, 5.0)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn surfaces_solve_the_equation_at_their_signed_curvature() {
        for s in surfaces() {
            for i in 0..10 {
                for j in 0..10 {
                    let p = s.sample_point([(i as f64 + 0.5) / 10.0, (j as f64 + 0.5) / 10.0]);
                    let r = q_residual(&s.jet(p).unwrap(), &s.params()).unwrap();
                    assert!(r.abs() <= 1e-9, "{:?} at {p:?}: {r}", s.kind);
                }
            }
        }
    }

    #[test]
    fn orientation_convention() {
        // convex graphs have positive signed curvature in both signatures
        for s in surfaces() {
            assert!(s.signed_h > 0.0, "{:?}", s.kind);
        }
    }

    #[test]
    fn lorentz_caps_stay_spacelike() {
        let s = ExactSurface::new(SurfaceKind::HyperbolicPlane { mean_curvature: 0.5 }, 0.0).unwrap();
        for k in 0..=100 {
            let r = 200.0 * k as f64 / 100.0;
            let g = s.jet(Vec2::new(r, 0.0)).unwrap().grad_norm();
            assert!(g < 1.0);
            assert_abs_diff_eq!(g, r / (4.0 + r * r).sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn euclidean_cap_rim_gradient() {
        let s = ExactSurface::new(SurfaceKind::EuclideanCap { mean_curvature: 0.5, rho: 1.0 }, 0.0).unwrap();
        let g = s.jet(Vec2::new(0.0, 1.0)).unwrap().grad_norm();
        assert_abs_diff_eq!(g, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn profile_examples() {
        let p = integrate_profile(1.0, -1.0, 1e-4).unwrap();
        assert_eq!(p.r0, 1.0);
        assert_eq!(p.slope(1.0), 0.0);
        assert_eq!(*p.w_values.last().unwrap(), 0.0);
        assert!(p.slope(1e-4) < -0.999);
        // light-cone tangency: (w(r) − ξ)/r → −1
        let w = p.value(1e-3).unwrap();
        assert_abs_diff_eq!((w - p.xi_estimate) / 1e-3, -1.0, epsilon = 1e-2);
        assert!(integrate_profile(1.0, 0.5, 0.1).is_err());
        assert!(integrate_profile(1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn profile_invariants() {
        let p = integrate_profile(1.0, -1.0, 1e-3).unwrap();
        for w in p.w_values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(p.w_values.iter().all(|&w| w >= 0.0));
        // convexity on the nonuniform grid: consecutive slopes increase
        let slopes: Vec<f64> = (1..p.r_values.len())
            .map(|k| (p.w_values[k] - p.w_values[k - 1]) / (p.r_values[k] - p.r_values[k - 1]))
            .collect();
        for s in slopes.windows(2) {
            assert!(s[1] - s[0] >= -1e-8);
        }
        assert!(p.r_values.iter().all(|&r| p.slope(r).abs() < 1.0));
        for d in p.first_integral_defects() {
            assert!(d.abs() <= 1e-8, "{d}");
        }
        // the rotational graph solves the equation with mean curvature H
        let params = McParams::new(1.0, Signature::Lorentzian);
        for k in 1..50 {
            let r = 0.01 + 0.98 * k as f64 / 50.0;
            let jet = p.jet(Vec2::from_angle(0.3 * k as f64) * r).unwrap();
            assert!(q_residual(&jet, &params).unwrap().abs() <= 1e-8);
        }
    }

    #[test]
    fn quadrature_matches_fine_reference() {
        // Simpson with 2000 steps against 20000 steps
        let p = integrate_profile(1.0, -1.0, 1e-2).unwrap();
        let (_, fine) = integrate_down(1.0, -1.0, 1.0, 1e-2);
        let (rs, _) = integrate_down(1.0, -1.0, 1.0, 1e-2);
        assert_eq!(rs.len(), p.r_values.len());
        assert_abs_diff_eq!(p.w_values[0], fine[0], epsilon = 1e-12);
    }

    #[test]
    fn family_limits() {
        let rows = profile_family_limits(1.0, &[-0.01, -1.0, -100.0]).unwrap();
        let r0: Vec<f64> = rows.iter().map(|r| r.r0).collect();
        assert_abs_diff_eq!(r0[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(r0[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r0[2], 10.0, epsilon = 1e-15);
        assert!(rows[0].xi_estimate < rows[1].xi_estimate);
        let rows = profile_family_limits(1.0, &[-0.1, -1.0, -10.0]).unwrap();
        assert!(rows[0].xi_estimate < rows[1].xi_estimate);
        assert!(rows[1].xi_estimate < rows[2].xi_estimate);
    }

    #[test]
    fn barrier_on_unit_disk() {
        let d = Domain::unit_disk();
        let p = barrier_for_domain(&d, 1.0, 0.3).unwrap();
        assert!(p.r0 > 2.0);
        assert_abs_diff_eq!(p.r_min(), 1.0, epsilon = 1e-9);
        assert!(p.w_values[0] > 0.3);
    }
}
