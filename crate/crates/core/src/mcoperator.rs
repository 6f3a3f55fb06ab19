//! Pointwise algebra of the mean-curvature operator for graphs `x₃ = u(x₁, x₂)`.
//!
//! With `W = √(1 + ε|Du|²)` the operator is
//!
//! ```text
//! Q[u] = (1 + ε u_y²) u_xx − 2ε u_x u_y u_xy + (1 + ε u_x²) u_yy − 2H W³
//!      = W³ (div(Du / W) − 2H)
//! ```
//!
//! and `Q[u] = 0` says the graph has constant mean curvature `H` for the
//! upward orientation `N = (−ε Du, 1) / W`. With this convention the lower
//! hemisphere `u = −√(1/H² − r²)` and the hyperbolic plane
//! `u = √(1/H² + r²)` both have `H > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual::{Dual2, Scalar};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum OperatorError {
    #[error("not spacelike: |Du| = {grad_norm} >= 1")]
    NotSpacelike { grad_norm: f64 },
    #[error("signature must be +1 or -1, got {0}")]
    InvalidSignature(i32),
}

/// Ambient signature: Euclidean (`ε = +1`) or Lorentz–Minkowski (`ε = −1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    #[serde(rename = "euclid")]
    Euclidean,
    #[serde(rename = "lorentz")]
    Lorentzian,
}

impl Signature {
    pub fn epsilon(self) -> f64 {
        match self {
            Signature::Euclidean => 1.0,
            Signature::Lorentzian => -1.0,
        }
    }

    pub fn from_epsilon(eps: i32) -> Result<Self, OperatorError> {
        match eps {
            1 => Ok(Signature::Euclidean),
            -1 => Ok(Signature::Lorentzian),
            other => Err(OperatorError::InvalidSignature(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Signature::Euclidean => "euclid",
            Signature::Lorentzian => "lorentz",
        }
    }
}

impl std::str::FromStr for Signature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclid" | "euclidean" | "+1" | "1" => Ok(Signature::Euclidean),
            "lorentz" | "lorentzian" | "-1" => Ok(Signature::Lorentzian),
            other => Err(format!("unknown signature '{other}' (expected euclid or lorentz)")),
        }
    }
}

/// Symmetric 2×2 matrix stored by its three distinct entries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const ZERO: SymMat2 = SymMat2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let rad = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean - rad, mean + rad)
    }

    /// Frobenius inner product with another symmetric matrix.
    pub fn contract(&self, other: &SymMat2) -> f64 {
        self.xx * other.xx + 2.0 * self.xy * other.xy + self.yy * other.yy
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yy.abs())
    }
}

/// Pointwise sample `(u, Du, D²u)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet {
    pub u: f64,
    pub du: [f64; 2],
    pub d2u: SymMat2,
}

impl Jet {
    pub fn new(u: f64, du: [f64; 2], d2u: SymMat2) -> Self {
        Self { u, du, d2u }
    }

    pub fn grad_norm(&self) -> f64 {
        grad_norm(self.du)
    }
}

/// Mean curvature and signature of an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McParams {
    pub mean_curvature: f64,
    pub signature: Signature,
}

impl McParams {
    pub fn new(mean_curvature: f64, signature: Signature) -> Self {
        Self {
            mean_curvature,
            signature,
        }
    }

    pub fn with_mean_curvature(self, mean_curvature: f64) -> Self {
        Self {
            mean_curvature,
            ..self
        }
    }
}

/// Coefficients of the linearized operator `a : D²v + b · Dv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Linearization {
    pub a: SymMat2,
    pub b: [f64; 2],
}

impl Linearization {
    /// Directional derivative of the residual along a jet perturbation.
    pub fn apply(&self, d_du: [f64; 2], d_d2u: &SymMat2) -> f64 {
        self.a.contract(d_d2u) + self.b[0] * d_du[0] + self.b[1] * d_du[1]
    }
}

pub fn grad_norm(du: [f64; 2]) -> f64 {
    du[0].hypot(du[1])
}

fn check_spacelike(du: [f64; 2], signature: Signature) -> Result<(), OperatorError> {
    let g = grad_norm(du);
    if signature == Signature::Lorentzian && !(g < 1.0) {
        return Err(OperatorError::NotSpacelike { grad_norm: g });
    }
    Ok(())
}

fn residual_generic<T: Scalar>(p: T, q: T, d2u: &SymMat2, h: f64, eps: f64) -> T {
    let one = T::constant(1.0);
    let w2 = one + (p * p + q * q) * eps;
    (one + q * q * eps) * d2u.xx - p * q * (2.0 * eps * d2u.xy) + (one + p * p * eps) * d2u.yy
        - w2 * w2.sqrt() * (2.0 * h)
}

/// Residual of the CMC equation at a jet; zero iff the jet satisfies it.
pub fn q_residual(jet: &Jet, params: &McParams) -> Result<f64, OperatorError> {
    check_spacelike(jet.du, params.signature)?;
    Ok(residual_generic(
        jet.du[0],
        jet.du[1],
        &jet.d2u,
        params.mean_curvature,
        params.signature.epsilon(),
    ))
}

/// The divergence-form flux `Du / √(1 + ε|Du|²)`.
pub fn flux(du: [f64; 2], signature: Signature) -> Result<[f64; 2], OperatorError> {
    check_spacelike(du, signature)?;
    let w = (1.0 + signature.epsilon() * (du[0] * du[0] + du[1] * du[1])).sqrt();
    Ok([du[0] / w, du[1] / w])
}

/// Vertical component `⟨N, e₃⟩ = ε / √(1 + ε|Du|²)` of the unit normal.
pub fn gauss_vertical(du: [f64; 2], signature: Signature) -> Result<f64, OperatorError> {
    check_spacelike(du, signature)?;
    let eps = signature.epsilon();
    Ok(eps / (1.0 + eps * (du[0] * du[0] + du[1] * du[1])).sqrt())
}

/// Smallest and largest eigenvalue of the second-order coefficient matrix.
///
/// For `ε = −1` and `|Du| ≥ 1` the smallest eigenvalue is `≤ 0`: ellipticity
/// is lost, which is reported as data.
pub fn ellipticity_eigenvalues(du: [f64; 2], signature: Signature) -> (f64, f64) {
    let g2 = du[0] * du[0] + du[1] * du[1];
    match signature {
        Signature::Euclidean => (1.0, 1.0 + g2),
        Signature::Lorentzian => (1.0 - g2, 1.0),
    }
}

/// Second-order coefficient matrix `(1 + ε|Du|²) δ − ε Du ⊗ Du`.
pub fn principal_coefficients(du: [f64; 2], signature: Signature) -> SymMat2 {
    let eps = signature.epsilon();
    SymMat2 {
        xx: 1.0 + eps * du[1] * du[1],
        xy: -eps * du[0] * du[1],
        yy: 1.0 + eps * du[0] * du[0],
    }
}

/// Linearization of the residual at a jet. The first-order coefficients are
/// obtained by forward-mode differentiation of the residual in the gradient
/// slots.
pub fn linearization_coeffs(jet: &Jet, params: &McParams) -> Result<Linearization, OperatorError> {
    check_spacelike(jet.du, params.signature)?;
    let p = Dual2::variable(jet.du[0], 0);
    let q = Dual2::variable(jet.du[1], 1);
    let r = residual_generic(
        p,
        q,
        &jet.d2u,
        params.mean_curvature,
        params.signature.epsilon(),
    );
    Ok(Linearization {
        a: principal_coefficients(jet.du, params.signature),
        b: r.d,
    })
}

/// Residual together with its linearization, in one pass.
pub fn residual_and_linearization(
    jet: &Jet,
    params: &McParams,
) -> Result<(f64, Linearization), OperatorError> {
    check_spacelike(jet.du, params.signature)?;
    let p = Dual2::variable(jet.du[0], 0);
    let q = Dual2::variable(jet.du[1], 1);
    let r = residual_generic(
        p,
        q,
        &jet.d2u,
        params.mean_curvature,
        params.signature.epsilon(),
    );
    Ok((
        r.v,
        Linearization {
            a: principal_coefficients(jet.du, params.signature),
            b: r.d,
        },
    ))
}

/// `1 − max |Du|`; negative when some gradient is not spacelike.
pub fn spacelike_margin(du_field: &[[f64; 2]]) -> f64 {
    1.0 - du_field.iter().map(|&d| grad_norm(d)).fold(0.0, f64::max)
}
