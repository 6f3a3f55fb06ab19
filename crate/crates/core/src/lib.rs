//! Numerical laboratory for the Dirichlet problem of the constant-mean-curvature
//! graph equation on bounded planar domains.
//!
//! Both ambient signatures are supported: Euclidean space (`ε = +1`) and
//! Lorentz–Minkowski space (`ε = −1`, spacelike graphs only). The crate is
//! organised bottom-up:
//!
//! * [`domain`]: planar domains and the boundary geometry the solvability
//!   hypotheses are phrased in (curvature, diameter, strip widths, exterior
//!   circle radius).
//! * [`mcoperator`]: pointwise algebra of the mean-curvature operator.
//! * [`discretization`]: embedded-boundary finite differences on a uniform
//!   grid, residual and sparse Jacobian assembly.
//! * [`linalg`]: compressed sparse rows and the sparse LU used by Newton.
//! * [`solver`]: continuation in the mean curvature with damped Newton, and
//!   the solvability predicates.
//! * [`catalog`]: exact CMC graphs and the rotational spacelike family used as
//!   oracles and barriers.
//! * [`estimates`]: height and gradient estimate checks on computed fields.

pub mod catalog;
pub mod discretization;
pub mod domain;
pub mod estimates;
pub mod linalg;
pub mod mcoperator;
pub mod solver;

mod dual;

pub use catalog::{ExactSurface, RotationalProfile, SurfaceKind};
pub use discretization::{DiscreteSystem, Field, Grid, NodeClass};
pub use domain::{BoundaryPoint, Domain, StripStats, Vec2};
pub use estimates::{EstimateCheck, EstimateReport};
pub use mcoperator::{Jet, McParams, Signature, SymMat2};
pub use solver::{ContinuationConfig, SolvabilityReport, SolveOutcome, SolveStatus};
