//! Embedded-boundary finite differences on a uniform Cartesian grid.
//!
//! Unknowns live on grid nodes strictly inside the domain. A node whose four
//! axis neighbours are unknowns is *interior*, otherwise it is *irregular*.
//! First and pure second derivatives use Shortley–Weller formulas with the
//! arm fractions to the boundary (central differences when all arms are
//! whole). The mixed derivative is the central formula when all eight
//! neighbours are unknowns, and otherwise comes from a least-squares
//! quadratic fit over the neighbouring unknowns and boundary intersection
//! points. Dirichlet data is eliminated: it enters through boundary sources
//! only.
//!
//! Nodes closer than `THETA_MIN·h` to the boundary along an axis are merged
//! into it. Their value is interpolated linearly between the nearest
//! boundary crossing and the opposite neighbour.
//!
//! Every derivative is a fixed linear form in the nodal and boundary values,
//! so the residual Jacobian is the linearization of the operator contracted
//! with these forms, and its sparsity pattern is fixed by the grid.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{Domain, Vec2};
use crate::linalg::CsrMatrix;
use crate::mcoperator::{
    q_residual, residual_and_linearization, Jet, McParams, OperatorError, SymMat2,
};

/// Arms shorter than this fraction of `h` are merged into the boundary.
pub const THETA_MIN: f64 = 0.05;

const BISECTION_STEPS: usize = 48;

/// Axis directions E, W, N, S.
const AXIS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
/// Diagonal directions NE, NW, SW, SE.
const DIAG: [(i64, i64); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid spacing {h} must be positive and at most diam/4 = {limit}")]
    SpacingTooLarge { h: f64, limit: f64 },
    #[error("no interior grid node at spacing {0}")]
    NoInteriorNodes(f64),
    #[error("point ({x:.6}, {y:.6}) is outside the interpolation-safe region")]
    OutsideSafeRegion { x: f64, y: f64 },
    #[error("field length {got} does not match grid ({expected})")]
    FieldMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("not spacelike at node {node} (|Du| = {grad_norm:.6})")]
    NotSpacelike { node: usize, grad_norm: f64 },
    #[error("continuation parameter t = {0} outside [0, 1]")]
    InvalidT(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Interior,
    Irregular,
    Exterior,
}

/// Where a stencil value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// An unknown, by unknown index.
    Unknown(usize),
    /// A Dirichlet location, by index into [`Grid::boundary_points`].
    Boundary(usize),
}

/// What an axis arm of an unknown ends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmTarget {
    Unknown(usize),
    /// A boundary intersection, by index into [`Grid::boundary_points`].
    Boundary(usize),
    /// A node merged into the boundary, by node index.
    Merged(usize),
}

/// Neighbour of an unknown along one axis direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    /// Distance to the neighbour value as a fraction of `h`.
    pub theta: f64,
    pub target: ArmTarget,
}

/// A value as a linear combination of sources.
type Combo = Vec<(Source, f64)>;

fn add_entry(stencil: &mut Vec<(Source, [f64; 5])>, combo: &[(Source, f64)], slot: usize, c: f64) {
    for &(s, w) in combo {
        if let Some(e) = stencil.iter_mut().find(|e| e.0 == s) {
            e.1[slot] += c * w;
        } else {
            let mut coeffs = [0.0; 5];
            coeffs[slot] = c * w;
            stencil.push((s, coeffs));
        }
    }
}

/// Coefficients of `(u_x, u_y, u_xx, u_xy, u_yy)` on one source value.
#[derive(Debug, Clone, Copy, PartialEq)]
struct StencilEntry {
    source: Source,
    coeffs: [f64; 5],
    /// Position in the Jacobian value array for unknown sources.
    jac_pos: usize,
}

const DX: usize = 0;
const DY: usize = 1;
const DXX: usize = 2;
const DXY: usize = 3;
const DYY: usize = 4;

/// Uniform grid over the (inflated) bounding box of a domain.
#[derive(Debug, Clone)]
pub struct Grid {
    origin: Vec2,
    h: f64,
    nx: usize,
    ny: usize,
    node_class: Vec<NodeClass>,
    merged: Vec<bool>,
    unknown_of_node: Vec<Option<usize>>,
    node_of_unknown: Vec<usize>,
    boundary_points: Vec<Vec2>,
    arms: Vec<[Arm; 4]>,
    fit_deficient: Vec<bool>,
    near_boundary: Vec<bool>,
    row_start: Vec<usize>,
    entries: Vec<StencilEntry>,
    pattern: CsrMatrix,
}

/// Summary written next to exported fields.
#[derive(Debug, Clone, Serialize)]
pub struct GridMetadata {
    pub origin: [f64; 2],
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub unknowns: usize,
    pub interior: usize,
    pub irregular: usize,
    pub merged: usize,
    pub boundary_points: usize,
    pub fit_deficient: usize,
}

/// Nodal values on the unknowns plus Dirichlet values at boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
    pub boundary_values: Vec<f64>,
}

/// Residual and Jacobian of the discrete problem.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub residual: Vec<f64>,
    pub jacobian: CsrMatrix,
}

impl Grid {
    /// Builds the grid for `domain` at spacing `h ≤ diam/4`. Spacings above
    /// `diam/8` give very coarse grids and are meant for smoke tests only.
    pub fn build(domain: &Domain, h: f64) -> Result<Self, GridError> {
        let limit = domain.diameter() / 4.0;
        if !(h > 0.0 && h <= limit) {
            return Err(GridError::SpacingTooLarge { h, limit });
        }
        let bbox = domain.bounding_box();
        let center = bbox.center();
        let half_nx = ((0.5 * bbox.width() + 2.0 * h) / h).ceil() as usize;
        let half_ny = ((0.5 * bbox.height() + 2.0 * h) / h).ceil() as usize;
        let nx = 2 * half_nx + 1;
        let ny = 2 * half_ny + 1;
        let origin = center - Vec2::new(half_nx as f64 * h, half_ny as f64 * h);
        let pos = |i: usize, j: usize| origin + Vec2::new(i as f64 * h, j as f64 * h);

        let inside: Vec<bool> = (0..nx * ny)
            .map(|k| domain.contains(pos(k % nx, k / nx)))
            .collect();
        let neighbour = |k: usize, (di, dj): (i64, i64)| -> Option<usize> {
            let i = (k % nx) as i64 + di;
            let j = (k / nx) as i64 + dj;
            (i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny)
                .then(|| j as usize * nx + i as usize)
        };
        let crossing = |k: usize, (di, dj): (i64, i64)| -> f64 {
            let p = pos(k % nx, k / nx);
            let step = Vec2::new(di as f64 * h, dj as f64 * h);
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if domain.contains(p + step * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let is_inside = |k: Option<usize>| k.is_some_and(|k| inside[k]);

        let merged: Vec<bool> = (0..nx * ny)
            .map(|k| {
                inside[k]
                    && AXIS
                        .iter()
                        .any(|&d| !is_inside(neighbour(k, d)) && crossing(k, d) < THETA_MIN)
            })
            .collect();
        let unknown_node = |k: usize| inside[k] && !merged[k];

        // order unknowns with the inner loop along the shorter axis
        let mut node_of_unknown = Vec::new();
        if nx <= ny {
            for j in 0..ny {
                for i in 0..nx {
                    if unknown_node(j * nx + i) {
                        node_of_unknown.push(j * nx + i);
                    }
                }
            }
        } else {
            for i in 0..nx {
                for j in 0..ny {
                    if unknown_node(j * nx + i) {
                        node_of_unknown.push(j * nx + i);
                    }
                }
            }
        }
        if node_of_unknown.is_empty() {
            return Err(GridError::NoInteriorNodes(h));
        }
        let mut unknown_of_node = vec![None; nx * ny];
        for (u, &k) in node_of_unknown.iter().enumerate() {
            unknown_of_node[k] = Some(u);
        }

        // A merged node sits within THETA_MIN·h of the boundary along its
        // shortest arm. Its value is interpolated linearly between the
        // boundary crossing and the opposite neighbour, which keeps the
        // scheme second order.
        let mut boundary_points = Vec::new();
        let mut merged_value: Vec<Option<Combo>> = vec![None; nx * ny];
        for k in (0..nx * ny).filter(|&k| merged[k]) {
            let (d, theta) = AXIS
                .iter()
                .filter(|&&d| !is_inside(neighbour(k, d)))
                .map(|&d| (d, crossing(k, d)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("merged nodes have a short arm");
            let p = pos(k % nx, k / nx);
            boundary_points.push(p + Vec2::new(d.0 as f64 * h, d.1 as f64 * h) * theta);
            let b = Source::Boundary(boundary_points.len() - 1);
            let opposite = neighbour(k, (-d.0, -d.1)).and_then(|nb| unknown_of_node[nb]);
            merged_value[k] = Some(match opposite {
                Some(v) => vec![(b, 1.0 / (1.0 + theta)), (Source::Unknown(v), theta / (1.0 + theta))],
                None => vec![(b, 1.0)],
            });
        }

        let mut node_class = vec![NodeClass::Exterior; nx * ny];
        let mut arms = Vec::with_capacity(node_of_unknown.len());
        let mut fit_deficient = Vec::with_capacity(node_of_unknown.len());
        let mut row_start = vec![0];
        let mut entries: Vec<StencilEntry> = Vec::new();

        // neighbour value along a direction: (offset in units of h, value, target)
        let resolve = |k: usize, d: (i64, i64), boundary_points: &mut Vec<Vec2>| {
            let nb = neighbour(k, d).expect("grid is inflated around the domain");
            if let Some(u) = unknown_of_node[nb] {
                return Some((1.0, vec![(Source::Unknown(u), 1.0)], ArmTarget::Unknown(u)));
            }
            if let Some(combo) = &merged_value[nb] {
                return Some((1.0, combo.clone(), ArmTarget::Merged(nb)));
            }
            let theta = crossing(k, d);
            if theta < THETA_MIN {
                return None;
            }
            let p = pos(k % nx, k / nx);
            boundary_points.push(p + Vec2::new(d.0 as f64 * h, d.1 as f64 * h) * theta);
            let b = boundary_points.len() - 1;
            Some((theta, vec![(Source::Boundary(b), 1.0)], ArmTarget::Boundary(b)))
        };

        for (u, &k) in node_of_unknown.iter().enumerate() {
            let axis: Vec<(f64, Combo, ArmTarget)> = AXIS
                .iter()
                .map(|&d| {
                    resolve(k, d, &mut boundary_points)
                        .expect("short axis arms were merged into the boundary")
                })
                .collect();
            let axis_inside = axis.iter().all(|a| matches!(a.2, ArmTarget::Unknown(_)));
            let regular = axis_inside
                && DIAG
                    .iter()
                    .all(|&d| neighbour(k, d).is_some_and(|nb| unknown_of_node[nb].is_some()));
            node_class[k] = if axis_inside {
                NodeClass::Interior
            } else {
                NodeClass::Irregular
            };
            arms.push([0, 1, 2, 3].map(|i| Arm {
                theta: axis[i].0,
                target: axis[i].2,
            }));

            let mut stencil: Vec<(Source, [f64; 5])> = Vec::new();
            let me = [(Source::Unknown(u), 1.0)];
            let mut add = |combo: &[(Source, f64)], slot: usize, c: f64| add_entry(&mut stencil, combo, slot, c);
            add(&me, DXX, 0.0);
            // Shortley–Weller along each axis: (plus arm, minus arm)
            for (plus, minus, d1, d2) in [(0, 1, DX, DXX), (2, 3, DY, DYY)] {
                let hr = axis[plus].0 * h;
                let hl = axis[minus].0 * h;
                let sum = hl + hr;
                add(&axis[plus].1, d1, hl / (hr * sum));
                add(&axis[minus].1, d1, -hr / (hl * sum));
                add(&me, d1, (hr - hl) / (hl * hr));
                add(&axis[plus].1, d2, 2.0 / (hr * sum));
                add(&axis[minus].1, d2, 2.0 / (hl * sum));
                add(&me, d2, -2.0 / (hl * hr));
            }
            let mut deficient = false;
            if regular {
                let w = 1.0 / (4.0 * h * h);
                for (d, sign) in DIAG.iter().zip([1.0, -1.0, 1.0, -1.0]) {
                    let nb = neighbour(k, *d).unwrap();
                    add(&[(Source::Unknown(unknown_of_node[nb].unwrap()), 1.0)], DXY, sign * w);
                }
            } else {
                // samples in units of h
                let mut samples: Vec<(f64, f64, Combo)> = vec![(0.0, 0.0, me.to_vec())];
                for (i, &(di, dj)) in AXIS.iter().enumerate() {
                    samples.push((di as f64 * axis[i].0, dj as f64 * axis[i].0, axis[i].1.clone()));
                }
                for &d in &DIAG {
                    if let Some((theta, combo, _)) = resolve(k, d, &mut boundary_points) {
                        samples.push((d.0 as f64 * theta, d.1 as f64 * theta, combo));
                    }
                }
                match mixed_derivative_weights(&samples) {
                    Some(weights) => {
                        for (w, s) in weights.iter().zip(&samples) {
                            add(&s.2, DXY, w / (h * h));
                        }
                    }
                    None => {
                        deficient = true;
                        // keep the structural entries
                        for s in &samples {
                            add(&s.2, DXY, 0.0);
                        }
                    }
                }
            }
            fit_deficient.push(deficient);
            // regular-node stencils also reference every 8-neighbour
            for &d in &DIAG {
                if let Some(nb) = neighbour(k, d) {
                    if let Some(v) = unknown_of_node[nb] {
                        add(&[(Source::Unknown(v), 1.0)], DXY, 0.0);
                    }
                }
            }
            entries.extend(stencil.into_iter().map(|(source, coeffs)| StencilEntry {
                source,
                coeffs,
                jac_pos: usize::MAX,
            }));
            row_start.push(entries.len());
        }

        let n = node_of_unknown.len();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for r in 0..n {
            for e in &entries[row_start[r]..row_start[r + 1]] {
                if let Source::Unknown(c) = e.source {
                    // merged-node interpolation reaches past the 8-neighbourhood;
                    // keep the pattern structurally symmetric
                    rows[r].push(c);
                    rows[c].push(r);
                }
            }
        }
        let pattern = CsrMatrix::from_pattern(&rows);
        for r in 0..n {
            for e in &mut entries[row_start[r]..row_start[r + 1]] {
                if let Source::Unknown(c) = e.source {
                    e.jac_pos = pattern.position(r, c).expect("pattern built from entries");
                }
            }
        }

        let near_boundary = node_of_unknown
            .iter()
            .map(|&k| {
                (-2i64..=2).any(|di| {
                    (-2i64..=2).any(|dj| {
                        di * di + dj * dj <= 4
                            && neighbour(k, (di, dj)).is_none_or(|nb| unknown_of_node[nb].is_none())
                    })
                })
            })
            .collect();

        Ok(Self {
            origin,
            h,
            nx,
            ny,
            node_class,
            merged,
            unknown_of_node,
            node_of_unknown,
            boundary_points,
            arms,
            fit_deficient,
            near_boundary,
            row_start,
            entries,
            pattern,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn num_unknowns(&self) -> usize {
        self.node_of_unknown.len()
    }

    pub fn node_position(&self, node: usize) -> Vec2 {
        self.origin + Vec2::new((node % self.nx) as f64 * self.h, (node / self.nx) as f64 * self.h)
    }

    /// Position of an unknown.
    pub fn position(&self, unknown: usize) -> Vec2 {
        self.node_position(self.node_of_unknown[unknown])
    }

    pub fn node_class(&self, node: usize) -> NodeClass {
        self.node_class[node]
    }

    /// Class of an unknown (interior or irregular).
    pub fn class_of_unknown(&self, unknown: usize) -> NodeClass {
        self.node_class[self.node_of_unknown[unknown]]
    }

    pub fn node_classes(&self) -> &[NodeClass] {
        &self.node_class
    }

    pub fn unknown_of_node(&self, node: usize) -> Option<usize> {
        self.unknown_of_node[node]
    }

    pub fn node_of_unknown(&self, unknown: usize) -> usize {
        self.node_of_unknown[unknown]
    }

    /// Whether a node inside the domain was folded into the boundary because
    /// one of its arms was shorter than [`THETA_MIN`].
    pub fn is_merged(&self, node: usize) -> bool {
        self.merged[node]
    }

    pub fn boundary_points(&self) -> &[Vec2] {
        &self.boundary_points
    }

    /// Axis arms (E, W, N, S) of an unknown.
    pub fn arms(&self, unknown: usize) -> &[Arm; 4] {
        &self.arms[unknown]
    }

    /// Whether the mixed-derivative fit at this unknown was rank deficient.
    pub fn fit_deficient(&self, unknown: usize) -> bool {
        self.fit_deficient[unknown]
    }

    /// Unknowns within `2h` of a non-unknown node.
    pub fn is_near_boundary(&self, unknown: usize) -> bool {
        self.near_boundary[unknown]
    }

    pub fn jacobian_pattern(&self) -> &CsrMatrix {
        &self.pattern
    }

    pub fn metadata(&self) -> GridMetadata {
        let count = |c: NodeClass| self.node_class.iter().filter(|&&x| x == c).count();
        GridMetadata {
            origin: [self.origin.x, self.origin.y],
            h: self.h,
            nx: self.nx,
            ny: self.ny,
            unknowns: self.num_unknowns(),
            interior: count(NodeClass::Interior),
            irregular: count(NodeClass::Irregular),
            merged: self.merged.iter().filter(|&&m| m).count(),
            boundary_points: self.boundary_points.len(),
            fit_deficient: self.fit_deficient.iter().filter(|&&d| d).count(),
        }
    }

    fn check_field(&self, field: &Field) -> Result<(), GridError> {
        if field.values.len() != self.num_unknowns() {
            return Err(GridError::FieldMismatch {
                expected: self.num_unknowns(),
                got: field.values.len(),
            });
        }
        if field.boundary_values.len() != self.boundary_points.len() {
            return Err(GridError::FieldMismatch {
                expected: self.boundary_points.len(),
                got: field.boundary_values.len(),
            });
        }
        Ok(())
    }

    fn source_value(&self, field: &Field, s: Source) -> f64 {
        match s {
            Source::Unknown(u) => field.values[u],
            Source::Boundary(b) => field.boundary_values[b],
        }
    }

    /// Discrete jet at an unknown.
    pub fn jet_at(&self, field: &Field, unknown: usize) -> Jet {
        let mut d = [0.0; 5];
        for e in &self.entries[self.row_start[unknown]..self.row_start[unknown + 1]] {
            let v = self.source_value(field, e.source);
            for (acc, c) in d.iter_mut().zip(e.coeffs) {
                *acc += c * v;
            }
        }
        Jet::new(
            field.values[unknown],
            [d[DX], d[DY]],
            SymMat2::new(d[DXX], d[DXY], d[DYY]),
        )
    }

    /// Discrete gradients at all unknowns.
    pub fn gradients(&self, field: &Field) -> Vec<[f64; 2]> {
        (0..self.num_unknowns())
            .map(|u| self.jet_at(field, u).du)
            .collect()
    }

    /// Residual of `Q_t` (mean curvature `t·H`) at every unknown.
    pub fn residual(&self, field: &Field, params: &McParams, t: f64) -> Result<Vec<f64>, AssemblyError> {
        check_t(t)?;
        let p = params.with_mean_curvature(t * params.mean_curvature);
        (0..self.num_unknowns())
            .map(|u| {
                q_residual(&self.jet_at(field, u), &p).map_err(|e| not_spacelike(u, e))
            })
            .collect()
    }

    /// Residual and exact Jacobian of `Q_t` with respect to the unknowns.
    pub fn assemble(&self, field: &Field, params: &McParams, t: f64) -> Result<DiscreteSystem, AssemblyError> {
        check_t(t)?;
        let p = params.with_mean_curvature(t * params.mean_curvature);
        let mut jacobian = self.pattern.clone();
        let mut residual = Vec::with_capacity(self.num_unknowns());
        let values = jacobian.values_mut();
        for u in 0..self.num_unknowns() {
            let jet = self.jet_at(field, u);
            let (r, lin) = residual_and_linearization(&jet, &p).map_err(|e| not_spacelike(u, e))?;
            residual.push(r);
            let w = [lin.b[0], lin.b[1], lin.a.xx, 2.0 * lin.a.xy, lin.a.yy];
            for e in &self.entries[self.row_start[u]..self.row_start[u + 1]] {
                if e.jac_pos != usize::MAX {
                    values[e.jac_pos] += w.iter().zip(e.coeffs).map(|(a, c)| a * c).sum::<f64>();
                }
            }
        }
        Ok(DiscreteSystem { residual, jacobian })
    }

    /// Discrete Laplacian of `field` and its matrix. Solving it against the
    /// boundary values gives the harmonic lift of the Dirichlet data.
    pub fn laplacian(&self, field: &Field) -> DiscreteSystem {
        let mut jacobian = self.pattern.clone();
        let values = jacobian.values_mut();
        let residual = (0..self.num_unknowns())
            .map(|u| {
                let mut acc = 0.0;
                for e in &self.entries[self.row_start[u]..self.row_start[u + 1]] {
                    let c = e.coeffs[DXX] + e.coeffs[DYY];
                    acc += c * self.source_value(field, e.source);
                    if e.jac_pos != usize::MAX {
                        values[e.jac_pos] += c;
                    }
                }
                acc
            })
            .collect();
        DiscreteSystem { residual, jacobian }
    }

    /// Bilinear interpolation from the cell containing `p`; all four cell
    /// corners must be unknowns.
    pub fn interpolate(&self, field: &Field, p: Vec2) -> Result<f64, GridError> {
        let out = GridError::OutsideSafeRegion { x: p.x, y: p.y };
        let s = (p - self.origin) * (1.0 / self.h);
        if !(s.x >= 0.0 && s.y >= 0.0) {
            return Err(out);
        }
        let (i, j) = (s.x.floor() as usize, s.y.floor() as usize);
        if i + 1 >= self.nx || j + 1 >= self.ny {
            return Err(out);
        }
        let (fx, fy) = (s.x - i as f64, s.y - j as f64);
        let mut acc = 0.0;
        for (di, dj, w) in [
            (0, 0, (1.0 - fx) * (1.0 - fy)),
            (1, 0, fx * (1.0 - fy)),
            (0, 1, (1.0 - fx) * fy),
            (1, 1, fx * fy),
        ] {
            let node = (j + dj) * self.nx + i + di;
            let u = self.unknown_of_node[node].ok_or(out.clone())?;
            acc += w * field.values[u];
        }
        Ok(acc)
    }

    /// Field as CSV with header `x,y,u`, one row per unknown.
    pub fn field_csv(&self, field: &Field) -> String {
        let mut out = String::from("x,y,u\n");
        for (u, v) in field.values.iter().enumerate() {
            let p = self.position(u);
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", p.x, p.y, v));
        }
        out
    }
}

impl Field {
    /// Zero on the unknowns, `boundary_data` at the Dirichlet locations.
    pub fn with_boundary_data(grid: &Grid, boundary_data: &dyn Fn(Vec2) -> f64) -> Self {
        Self {
            values: vec![0.0; grid.num_unknowns()],
            boundary_values: grid.boundary_points.iter().map(|&p| boundary_data(p)).collect(),
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::with_boundary_data(grid, &|_| 0.0)
    }

    /// Samples `f` at every unknown and boundary location.
    pub fn from_fn(grid: &Grid, f: &dyn Fn(Vec2) -> f64) -> Self {
        Self {
            values: (0..grid.num_unknowns()).map(|u| f(grid.position(u))).collect(),
            boundary_values: grid.boundary_points.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<(), GridError> {
        grid.check_field(self)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_t(t: f64) -> Result<(), AssemblyError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(AssemblyError::InvalidT(t))
    }
}

fn not_spacelike(node: usize, e: OperatorError) -> AssemblyError {
    match e {
        OperatorError::NotSpacelike { grad_norm } => AssemblyError::NotSpacelike { node, grad_norm },
        OperatorError::InvalidSignature(_) => unreachable!("signature is an enum"),
    }
}

/// Least-squares weights `w` with `u_xy ≈ Σ w_k u_k / h²` for samples at
/// offsets `(X_k, Y_k)` measured in units of `h`. `None` when the quadratic
/// fit is rank deficient.
fn mixed_derivative_weights<T>(samples: &[(f64, f64, T)]) -> Option<Vec<f64>> {
    if samples.len() < 6 {
        return None;
    }
    let basis = |x: f64, y: f64| [1.0, x, y, x * x, x * y, y * y];
    let rows: Vec<[f64; 6]> = samples.iter().map(|&(x, y, _)| basis(x, y)).collect();
    let mut normal = [[0.0; 6]; 6];
    for r in &rows {
        for i in 0..6 {
            for j in 0..6 {
                normal[i][j] += r[i] * r[j];
            }
        }
    }
    let trace: f64 = (0..6).map(|i| normal[i][i]).sum();
    // Cholesky of the normal matrix
    let mut l = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..=i {
            let s: f64 = normal[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 1e-10 * trace {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // solve (LLᵀ) z = e_xy
    let mut z = [0.0; 6];
    let mut rhs = [0.0; 6];
    rhs[4] = 1.0;
    for i in 0..6 {
        z[i] = (rhs[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
    }
    for i in (0..6).rev() {
        z[i] = (z[i] - (i + 1..6).map(|k| l[k][i] * z[k]).sum::<f64>()) / l[i][i];
    }
    Some(
        rows.iter()
            .map(|r| r.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect(),
    )
}
