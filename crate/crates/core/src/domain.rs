//! Bounded planar domains and their boundary geometry.
//!
//! Curvature is always measured with respect to the inner normal, so convex
//! pieces of the boundary carry positive curvature.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of boundary samples for diameter and width computations.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 1024;

/// Rays used when tracing an implicit boundary.
const MIN_TRACE_RAYS: usize = 4096;
/// Samples along each ray when checking that it crosses the zero level once.
const RAY_SAMPLES: usize = 96;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("invalid domain parameter: {0}")]
    InvalidParameter(String),
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("implicit zero level is not a single closed loop around the trace center (ray angle {angle:.6})")]
    TraceFailed { angle: f64 },
    #[error("no exterior tangent circle of positive radius at boundary point ({x:.6}, {y:.6})")]
    NoExteriorCircle { x: f64, y: f64 },
}

/// A point or a vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    /// Counterclockwise rotation by a right angle.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Vec2,
    pub max: Vec2,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }
}

type LevelFn = dyn Fn(Vec2) -> f64 + Send + Sync;

/// A level-set description: negative inside, positive outside.
///
/// The zero level is traced by casting rays from `center`, so the region must
/// be star-shaped with respect to it.
#[derive(Clone)]
pub struct LevelSet {
    func: Arc<LevelFn>,
    bbox: BoundingBox,
    center: Vec2,
    label: String,
}

impl LevelSet {
    pub fn eval(&self, p: Vec2) -> f64 {
        (self.func)(p)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelSet")
            .field("label", &self.label)
            .field("bbox", &self.bbox)
            .field("center", &self.center)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    Disk { center: Vec2, radius: f64 },
    Rectangle { corner: Vec2, width: f64, height: f64 },
    /// Counterclockwise vertex list.
    Polygon { vertices: Vec<Vec2> },
    Implicit(LevelSet),
}

/// A sample of the boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub position: Vec2,
    pub inward_normal: Vec2,
    /// Signed curvature with respect to the inner normal. Zero at polygon
    /// corners, which are flagged by `corner` instead.
    pub curvature: f64,
    pub corner: bool,
}

/// Range of boundary curvature over smooth samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureRange {
    pub min: f64,
    pub max: f64,
    /// Number of polygon vertices (the boundary is nonsmooth there).
    pub corners: usize,
    /// Vertices with an interior angle above π.
    pub reflex_corners: usize,
}

impl CurvatureRange {
    pub fn is_smooth(&self) -> bool {
        self.corners == 0
    }

    pub fn is_convex(&self) -> bool {
        self.min >= 0.0 && self.reflex_corners == 0
    }
}

/// Widths of the minimal enclosing strips, one per direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripStats {
    /// Width of the narrowest strip containing the domain.
    pub min_width: f64,
    /// Largest minimal-strip width over all sampled directions.
    pub max_min_width_over_directions: f64,
    /// `(angle of the strip normal, width)`, angles in `[0, π)`.
    pub width_by_direction: Vec<(f64, f64)>,
    pub samples: usize,
}

/// A bounded, simply connected planar region.
#[derive(Debug, Clone)]
pub struct Domain {
    shape: Shape,
}

impl Domain {
    pub fn disk(center: Vec2, radius: f64) -> Result<Self, DomainError> {
        if !(radius.is_finite() && radius > 0.0) || !center.x.is_finite() || !center.y.is_finite()
        {
            return Err(DomainError::InvalidParameter(format!(
                "disk radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            shape: Shape::Disk { center, radius },
        })
    }

    pub fn unit_disk() -> Self {
        Self::disk(Vec2::ZERO, 1.0).expect("unit disk is valid")
    }

    pub fn rectangle(corner: Vec2, width: f64, height: f64) -> Result<Self, DomainError> {
        for (name, v) in [("width", width), ("height", height)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DomainError::InvalidParameter(format!(
                    "rectangle {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            shape: Shape::Rectangle {
                corner,
                width,
                height,
            },
        })
    }

    /// Polygon from its vertices. Clockwise input is reoriented.
    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self, DomainError> {
        let mut vertices = vertices;
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(DomainError::InvalidParameter(
                "polygon needs at least three vertices".into(),
            ));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(DomainError::InvalidParameter(
                "polygon vertex is not finite".into(),
            ));
        }
        check_simple(&vertices)?;
        let area = shoelace(&vertices);
        if area.abs() < 1e-300 {
            return Err(DomainError::InvalidParameter("polygon is degenerate".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self {
            shape: Shape::Polygon { vertices },
        })
    }

    /// Region `{f < 0}` inside `bbox`, star-shaped about `center`.
    pub fn implicit<F>(
        label: impl Into<String>,
        bbox: BoundingBox,
        center: Vec2,
        f: F,
    ) -> Result<Self, DomainError>
    where
        F: Fn(Vec2) -> f64 + Send + Sync + 'static,
    {
        let level = LevelSet {
            func: Arc::new(f),
            bbox,
            center,
            label: label.into(),
        };
        if !(level.eval(center) < 0.0) {
            return Err(DomainError::InvalidParameter(
                "trace center of an implicit domain must lie inside".into(),
            ));
        }
        let domain = Self {
            shape: Shape::Implicit(level),
        };
        domain.trace_loop(720)?;
        Ok(domain)
    }

    /// Ellipse with semi-axes `a` (along x) and `b` centered at the origin.
    pub fn ellipse(a: f64, b: f64) -> Result<Self, DomainError> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(DomainError::InvalidParameter(format!(
                "ellipse semi-axes must be positive, got ({a}, {b})"
            )));
        }
        let bbox = BoundingBox {
            min: Vec2::new(-a, -b),
            max: Vec2::new(a, b),
        };
        Self::implicit(format!("ellipse(a={a}, b={b})"), bbox, Vec2::ZERO, move |p| {
            (p.x / a).powi(2) + (p.y / b).powi(2) - 1.0
        })
    }

    /// Star-shaped region `r < base + amplitude·cos(lobes·θ)`.
    pub fn polar_star(base: f64, amplitude: f64, lobes: u32) -> Result<Self, DomainError> {
        if !(base > 0.0 && amplitude.abs() < base && base.is_finite() && amplitude.is_finite()) {
            return Err(DomainError::InvalidParameter(format!(
                "polar star needs 0 <= |amplitude| < base, got base={base}, amplitude={amplitude}"
            )));
        }
        let rmax = base + amplitude.abs();
        let bbox = BoundingBox {
            min: Vec2::new(-rmax, -rmax),
            max: Vec2::new(rmax, rmax),
        };
        let k = lobes as f64;
        Self::implicit(
            format!("polar_star(base={base}, amplitude={amplitude}, lobes={lobes})"),
            bbox,
            Vec2::ZERO,
            move |p| p.norm() - (base + amplitude * (k * p.y.atan2(p.x)).cos()),
        )
    }

    /// Rectangle of the given size centered at the origin, corners rounded
    /// with radius `corner_radius` so that the boundary is `C¹` with bounded
    /// curvature.
    pub fn rounded_rectangle(
        width: f64,
        height: f64,
        corner_radius: f64,
    ) -> Result<Self, DomainError> {
        if !(width > 0.0 && height > 0.0 && corner_radius > 0.0)
            || 2.0 * corner_radius > width.min(height)
        {
            return Err(DomainError::InvalidParameter(format!(
                "rounded rectangle needs 0 < 2·corner_radius <= min(width, height), got {width}x{height} r={corner_radius}"
            )));
        }
        let hx = 0.5 * width;
        let hy = 0.5 * height;
        let bbox = BoundingBox {
            min: Vec2::new(-hx, -hy),
            max: Vec2::new(hx, hy),
        };
        let (ix, iy, rc) = (hx - corner_radius, hy - corner_radius, corner_radius);
        Self::implicit(
            format!("rounded_rectangle(width={width}, height={height}, corner_radius={corner_radius})"),
            bbox,
            Vec2::ZERO,
            move |p| {
                let dx = p.x.abs() - ix;
                let dy = p.y.abs() - iy;
                let outside = Vec2::new(dx.max(0.0), dy.max(0.0)).norm();
                outside + dx.max(dy).min(0.0) - rc
            },
        )
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match &self.shape {
            Shape::Disk { center, radius } => {
                format!("disk(center=({}, {}), radius={radius})", center.x, center.y)
            }
            Shape::Rectangle {
                corner,
                width,
                height,
            } => format!(
                "rectangle(corner=({}, {}), width={width}, height={height})",
                corner.x, corner.y
            ),
            Shape::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
            Shape::Implicit(level) => level.label.clone(),
        }
    }

    pub fn bounding_box(&self) -> BoundingBox {
        match &self.shape {
            Shape::Disk { center, radius } => BoundingBox {
                min: *center - Vec2::new(*radius, *radius),
                max: *center + Vec2::new(*radius, *radius),
            },
            Shape::Rectangle {
                corner,
                width,
                height,
            } => BoundingBox {
                min: *corner,
                max: *corner + Vec2::new(*width, *height),
            },
            Shape::Polygon { vertices } => {
                let mut min = vertices[0];
                let mut max = vertices[0];
                for v in vertices {
                    min = Vec2::new(min.x.min(v.x), min.y.min(v.y));
                    max = Vec2::new(max.x.max(v.x), max.y.max(v.y));
                }
                BoundingBox { min, max }
            }
            Shape::Implicit(level) => level.bbox,
        }
    }

    /// Vertices for polygonal shapes (rectangles included), counterclockwise.
    pub fn polygon_vertices(&self) -> Option<Vec<Vec2>> {
        match &self.shape {
            Shape::Rectangle {
                corner,
                width,
                height,
            } => Some(vec![
                *corner,
                *corner + Vec2::new(*width, 0.0),
                *corner + Vec2::new(*width, *height),
                *corner + Vec2::new(0.0, *height),
            ]),
            Shape::Polygon { vertices } => Some(vertices.clone()),
            _ => None,
        }
    }

    /// Whether `p` lies strictly inside the domain.
    pub fn contains(&self, p: Vec2) -> bool {
        match &self.shape {
            Shape::Disk { center, radius } => (p - *center).norm() < *radius,
            Shape::Rectangle {
                corner,
                width,
                height,
            } => {
                p.x > corner.x
                    && p.x < corner.x + width
                    && p.y > corner.y
                    && p.y < corner.y + height
            }
            Shape::Polygon { vertices } => polygon_contains_strict(vertices, p),
            Shape::Implicit(level) => level.eval(p) < 0.0,
        }
    }

    /// A function that is negative inside, zero on the boundary and positive
    /// outside. For disks, rectangles and polygons it is the signed distance.
    pub fn level(&self, p: Vec2) -> f64 {
        match &self.shape {
            Shape::Disk { center, radius } => (p - *center).norm() - radius,
            Shape::Rectangle {
                corner,
                width,
                height,
            } => {
                let c = *corner + Vec2::new(0.5 * width, 0.5 * height);
                let dx = (p.x - c.x).abs() - 0.5 * width;
                let dy = (p.y - c.y).abs() - 0.5 * height;
                Vec2::new(dx.max(0.0), dy.max(0.0)).norm() + dx.max(dy).min(0.0)
            }
            Shape::Polygon { vertices } => {
                let d = polygon_edge_distance(vertices, p);
                if polygon_contains_strict(vertices, p) {
                    -d
                } else {
                    d
                }
            }
            Shape::Implicit(level) => level.eval(p),
        }
    }

    /// Distance from `p` to the boundary curve (polygonal approximation for
    /// implicit shapes).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        match &self.shape {
            Shape::Disk { center, radius } => ((p - *center).norm() - radius).abs(),
            Shape::Implicit(_) => {
                let loop_pts: Vec<Vec2> = self
                    .boundary_sample(DEFAULT_BOUNDARY_SAMPLES)
                    .expect("implicit domain validated at construction")
                    .iter()
                    .map(|b| b.position)
                    .collect();
                polygon_edge_distance(&loop_pts, p)
            }
            _ => {
                let v = self.polygon_vertices().expect("polygonal shape");
                polygon_edge_distance(&v, p)
            }
        }
    }

    /// `n` counterclockwise boundary samples, approximately equispaced in arc
    /// length, each carrying its inward normal and curvature.
    pub fn boundary_sample(&self, n: usize) -> Result<Vec<BoundaryPoint>, DomainError> {
        if n < 4 {
            return Err(DomainError::InvalidParameter(format!(
                "boundary_sample needs n >= 4, got {n}"
            )));
        }
        match &self.shape {
            Shape::Disk { center, radius } => Ok((0..n)
                .map(|k| {
                    let dir = Vec2::from_angle(2.0 * PI * k as f64 / n as f64);
                    BoundaryPoint {
                        position: *center + dir * *radius,
                        inward_normal: -dir,
                        curvature: 1.0 / radius,
                        corner: false,
                    }
                })
                .collect()),
            Shape::Rectangle { .. } | Shape::Polygon { .. } => {
                let vertices = self.polygon_vertices().expect("polygonal shape");
                Ok(sample_polygon(&vertices, n))
            }
            Shape::Implicit(level) => self.sample_implicit(level, n),
        }
    }

    fn sample_implicit(&self, level: &LevelSet, n: usize) -> Result<Vec<BoundaryPoint>, DomainError> {
        let dense = self.trace_loop(MIN_TRACE_RAYS.max(8 * n))?;
        let m = dense.len();
        let mut cumulative = Vec::with_capacity(m + 1);
        cumulative.push(0.0);
        for i in 0..m {
            let next = dense[(i + 1) % m];
            cumulative.push(cumulative[i] + dense[i].dist(next));
        }
        let total = cumulative[m];
        let hg = self.geometry_step();
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for k in 0..n {
            let s = total * k as f64 / n as f64;
            while cumulative[seg + 1] < s {
                seg += 1;
            }
            let span = cumulative[seg + 1] - cumulative[seg];
            let frac = if span > 0.0 {
                (s - cumulative[seg]) / span
            } else {
                0.0
            };
            let a = dense[seg];
            let b = dense[(seg + 1) % m];
            let mut p = a + (b - a) * frac;
            // project onto the zero level
            for _ in 0..4 {
                let (fx, fy) = gradient(level, p, hg);
                let g2 = fx * fx + fy * fy;
                if g2 == 0.0 {
                    break;
                }
                let f = level.eval(p);
                p = p - Vec2::new(fx, fy) * (f / g2);
            }
            let (normal, curvature) = implicit_normal_curvature(level, p, hg);
            out.push(BoundaryPoint {
                position: p,
                inward_normal: normal,
                curvature,
                corner: false,
            });
        }
        Ok(out)
    }

    /// Step for finite-difference derivatives of the level function.
    fn geometry_step(&self) -> f64 {
        1e-5 * self.bounding_box().diagonal()
    }

    /// Boundary points along `n` equiangular rays from the trace center.
    fn trace_loop(&self, n: usize) -> Result<Vec<Vec2>, DomainError> {
        let Shape::Implicit(level) = &self.shape else {
            unreachable!("trace_loop is only used for implicit shapes");
        };
        let c = level.center;
        let reach = level
            .bbox
            .corners()
            .iter()
            .map(|q| q.dist(c))
            .fold(0.0, f64::max)
            * 1.05;
        let mut pts = Vec::with_capacity(n);
        for k in 0..n {
            let angle = 2.0 * PI * k as f64 / n as f64;
            let dir = Vec2::from_angle(angle);
            let mut crossing = None;
            let mut prev_inside = true;
            let mut prev_s = 0.0;
            for j in 1..=RAY_SAMPLES {
                let s = reach * j as f64 / RAY_SAMPLES as f64;
                let inside = level.eval(c + dir * s) < 0.0;
                if inside != prev_inside {
                    if inside || crossing.is_some() {
                        return Err(DomainError::TraceFailed { angle });
                    }
                    crossing = Some((prev_s, s));
                }
                prev_inside = inside;
                prev_s = s;
            }
            let Some((mut lo, mut hi)) = crossing else {
                return Err(DomainError::TraceFailed { angle });
            };
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                if level.eval(c + dir * mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            pts.push(c + dir * (0.5 * (lo + hi)));
        }
        Ok(pts)
    }

    /// Minimum and maximum signed boundary curvature over smooth samples.
    pub fn curvature_range(&self, n: usize) -> Result<CurvatureRange, DomainError> {
        let samples = self.boundary_sample(n)?;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for s in samples.iter().filter(|s| !s.corner) {
            min = min.min(s.curvature);
            max = max.max(s.curvature);
        }
        let (corners, reflex_corners) = match self.polygon_vertices() {
            Some(v) => {
                let n = v.len();
                let reflex = (0..n)
                    .filter(|&i| {
                        let a = v[(i + n - 1) % n];
                        let b = v[i];
                        let c = v[(i + 1) % n];
                        (b - a).cross(c - b) < 0.0
                    })
                    .count();
                (n, reflex)
            }
            None => (0, 0),
        };
        Ok(CurvatureRange {
            min,
            max,
            corners,
            reflex_corners,
        })
    }

    /// Largest distance between two boundary points, from the default sample
    /// count (exact for disks and polygons).
    pub fn diameter(&self) -> f64 {
        self.diameter_with(DEFAULT_BOUNDARY_SAMPLES)
    }

    pub fn diameter_with(&self, n: usize) -> f64 {
        if let Shape::Disk { radius, .. } = &self.shape {
            return 2.0 * radius;
        }
        let pts = self.hull_points(n);
        let mut best: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    /// Points whose convex hull equals (or approximates) the hull of the domain.
    fn hull_points(&self, n: usize) -> Vec<Vec2> {
        match self.polygon_vertices() {
            Some(v) => v,
            None => self
                .boundary_sample(n)
                .expect("domain validated at construction")
                .into_iter()
                .map(|b| b.position)
                .collect(),
        }
    }

    /// Minimal enclosing strip width for `n_directions` equispaced strip
    /// normals in `[0, π)`; polygons also test every edge normal.
    pub fn strip_stats(&self, n_directions: usize) -> StripStats {
        let n_directions = n_directions.max(1);
        let mut angles: Vec<f64> = (0..n_directions)
            .map(|k| PI * k as f64 / n_directions as f64)
            .collect();
        let (pts, samples) = match &self.shape {
            Shape::Disk { center, radius } => {
                let width = 2.0 * radius;
                let _ = center;
                return StripStats {
                    min_width: width,
                    max_min_width_over_directions: width,
                    width_by_direction: angles.into_iter().map(|a| (a, width)).collect(),
                    samples: 0,
                };
            }
            _ => {
                let pts = self.hull_points(DEFAULT_BOUNDARY_SAMPLES);
                let samples = pts.len();
                (pts, samples)
            }
        };
        if let Some(v) = self.polygon_vertices() {
            let n = v.len();
            for i in 0..n {
                let e = v[(i + 1) % n] - v[i];
                let normal_angle = e.perp().y.atan2(e.perp().x).rem_euclid(PI);
                angles.push(normal_angle);
            }
            angles.sort_by(f64::total_cmp);
        }
        let width_by_direction: Vec<(f64, f64)> = angles
            .into_iter()
            .map(|a| (a, projected_width(&pts, Vec2::from_angle(a))))
            .collect();
        let min_width = width_by_direction
            .iter()
            .map(|&(_, w)| w)
            .fold(f64::INFINITY, f64::min);
        let max_width = width_by_direction
            .iter()
            .map(|&(_, w)| w)
            .fold(0.0, f64::max);
        StripStats {
            min_width,
            max_min_width_over_directions: max_width,
            width_by_direction,
            samples,
        }
    }

    /// `(area, perimeter)`. Closed form for disks and polygons; implicit
    /// domains integrate along a densely traced boundary.
    pub fn area_perimeter(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Disk { radius, .. } => (PI * radius * radius, 2.0 * PI * radius),
            Shape::Implicit(_) => {
                let pts = self.trace_loop(1 << 15).expect("validated at construction");
                (shoelace(&pts).abs(), loop_length(&pts))
            }
            _ => {
                let v = self.polygon_vertices().expect("polygonal shape");
                (shoelace(&v).abs(), loop_length(&v))
            }
        }
    }

    /// Largest radius `ε` such that at every (smooth) boundary sample the
    /// exterior tangent disk of radius `ε` misses the domain.
    ///
    /// The sampled value is capped by the smallest radius of curvature of the
    /// boundary (half the diameter when the boundary has no positive
    /// curvature), which keeps the result finite for convex domains.
    pub fn exterior_circle_radius(&self, n: usize) -> Result<f64, DomainError> {
        let samples = self.boundary_sample(n)?;
        let scale = self.diameter();
        let mut eps = f64::INFINITY;
        let mut kappa_max: f64 = 0.0;
        for (i, s) in samples.iter().enumerate() {
            if s.corner {
                continue;
            }
            kappa_max = kappa_max.max(s.curvature);
            let mut local = f64::INFINITY;
            for (j, o) in samples.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = o.position - s.position;
                let along = d.dot(s.inward_normal);
                if along < 0.0 {
                    local = local.min(d.norm_sq() / (-2.0 * along));
                }
            }
            if local <= 1e-9 * scale {
                return Err(DomainError::NoExteriorCircle {
                    x: s.position.x,
                    y: s.position.y,
                });
            }
            eps = eps.min(local);
        }
        let cap = if kappa_max > 0.0 {
            1.0 / kappa_max
        } else {
            0.5 * scale
        };
        Ok(eps.min(cap))
    }

    /// Radius of the largest inscribed disk, estimated over candidate centers
    /// with resolution `diameter / 512`.
    pub fn inradius_estimate(&self) -> f64 {
        if let Shape::Disk { radius, .. } = &self.shape {
            return *radius;
        }
        let boundary: Vec<Vec2> = match self.polygon_vertices() {
            Some(v) => v,
            None => self
                .boundary_sample(DEFAULT_BOUNDARY_SAMPLES)
                .expect("validated")
                .iter()
                .map(|b| b.position)
                .collect(),
        };
        let bbox = self.bounding_box();
        let fine = self.diameter() / 512.0;
        let coarse = fine * 8.0;
        let score = |p: Vec2| {
            if self.contains(p) {
                polygon_edge_distance(&boundary, p)
            } else {
                -1.0
            }
        };
        let nx = (bbox.width() / coarse).ceil() as usize + 1;
        let ny = (bbox.height() / coarse).ceil() as usize + 1;
        let mut candidates: Vec<(f64, Vec2)> = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                let p = bbox.min + Vec2::new(i as f64 * coarse, j as f64 * coarse);
                let s = score(p);
                if s > 0.0 {
                    candidates.push((s, p));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
        candidates.truncate(8);
        let mut best = candidates.first().map_or(0.0, |c| c.0);
        for &(_, c) in &candidates {
            for i in -8i32..=8 {
                for j in -8i32..=8 {
                    let p = c + Vec2::new(i as f64 * fine, j as f64 * fine);
                    best = best.max(score(p));
                }
            }
        }
        best
    }
}

fn gradient(level: &LevelSet, p: Vec2, hg: f64) -> (f64, f64) {
    let fx = (level.eval(p + Vec2::new(hg, 0.0)) - level.eval(p - Vec2::new(hg, 0.0))) / (2.0 * hg);
    let fy = (level.eval(p + Vec2::new(0.0, hg)) - level.eval(p - Vec2::new(0.0, hg))) / (2.0 * hg);
    (fx, fy)
}

/// Inward normal and curvature of the level curve through `p`:
/// `κ = div(∇f/|∇f|)`, positive where the inside `{f < 0}` is convex.
fn implicit_normal_curvature(level: &LevelSet, p: Vec2, hg: f64) -> (Vec2, f64) {
    let f = |dx: f64, dy: f64| level.eval(p + Vec2::new(dx * hg, dy * hg));
    let f0 = f(0.0, 0.0);
    let fx = (f(1.0, 0.0) - f(-1.0, 0.0)) / (2.0 * hg);
    let fy = (f(0.0, 1.0) - f(0.0, -1.0)) / (2.0 * hg);
    let fxx = (f(1.0, 0.0) - 2.0 * f0 + f(-1.0, 0.0)) / (hg * hg);
    let fyy = (f(0.0, 1.0) - 2.0 * f0 + f(0.0, -1.0)) / (hg * hg);
    let fxy = (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (4.0 * hg * hg);
    let g = fx.hypot(fy);
    let kappa = (fxx * fy * fy - 2.0 * fx * fy * fxy + fyy * fx * fx) / (g * g * g);
    (Vec2::new(-fx / g, -fy / g), kappa)
}

/// Every vertex plus `n − m` edge points, spread over the edges in
/// proportion to their length (largest remainder) and equispaced on each.
fn sample_polygon(vertices: &[Vec2], n: usize) -> Vec<BoundaryPoint> {
    let m = vertices.len();
    let lengths: Vec<f64> = (0..m)
        .map(|i| vertices[i].dist(vertices[(i + 1) % m]))
        .collect();
    let perimeter: f64 = lengths.iter().sum();
    let extra = n.saturating_sub(m);
    let quotas: Vec<f64> = lengths.iter().map(|l| extra as f64 * l / perimeter).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())));
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(extra - assigned) {
        counts[i] += 1;
    }
    let edge_normal = |i: usize| (vertices[(i + 1) % m] - vertices[i]).perp().normalized();
    let mut out = Vec::with_capacity(n.max(m));
    for i in 0..m {
        let a = vertices[i];
        let b = vertices[(i + 1) % m];
        out.push(BoundaryPoint {
            position: a,
            inward_normal: (edge_normal((i + m - 1) % m) + edge_normal(i)).normalized(),
            curvature: 0.0,
            corner: true,
        });
        for k in 1..=counts[i] {
            let f = k as f64 / (counts[i] + 1) as f64;
            out.push(BoundaryPoint {
                position: a + (b - a) * f,
                inward_normal: edge_normal(i),
                curvature: 0.0,
                corner: false,
            });
        }
    }
    out
}

/// Signed area, positive for counterclockwise loops.
fn shoelace(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>()
}

fn loop_length(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].dist(pts[(i + 1) % n])).sum()
}

fn projected_width(pts: &[Vec2], dir: Vec2) -> f64 {
    let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let s = p.dot(dir);
        (lo.min(s), hi.max(s))
    });
    hi - lo
}

fn segment_distance(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn polygon_edge_distance(vertices: &[Vec2], p: Vec2) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| segment_distance(vertices[i], vertices[(i + 1) % n], p))
        .fold(f64::INFINITY, f64::min)
}

fn polygon_contains_strict(vertices: &[Vec2], p: Vec2) -> bool {
    let scale = vertices
        .iter()
        .map(|v| v.x.abs().max(v.y.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    if polygon_edge_distance(vertices, p) <= 1e-14 * scale {
        return false;
    }
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

fn check_simple(vertices: &[Vec2]) -> Result<(), DomainError> {
    let n = vertices.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(
                vertices[i],
                vertices[(i + 1) % n],
                vertices[j],
                vertices[(j + 1) % n],
            ) {
                return Err(DomainError::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rect_2x1() -> Domain {
        Domain::rectangle(Vec2::ZERO, 2.0, 1.0).unwrap()
    }

    fn star() -> Domain {
        Domain::polar_star(1.0, 0.3, 5).unwrap()
    }

    fn triangle() -> Domain {
        Domain::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.5, 3f64.sqrt() / 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn contains_examples() {
        let disk = Domain::unit_disk();
        assert!(disk.contains(Vec2::new(0.0, 0.0)));
        assert!(!disk.contains(Vec2::new(1.0, 0.0)));
        let square = Domain::rectangle(Vec2::ZERO, 1.0, 1.0).unwrap();
        assert!(square.contains(Vec2::new(0.5, 0.25)));
        assert!(!square.contains(Vec2::new(1.0, 0.5)));
        let tri = triangle();
        assert!(tri.contains(Vec2::new(0.5, 0.3)));
        assert!(!tri.contains(Vec2::new(0.5, 0.0)));
    }

    #[test]
    fn disk_samples_have_unit_curvature() {
        let pts = Domain::unit_disk().boundary_sample(4).unwrap();
        assert_eq!(pts.len(), 4);
        for p in pts {
            assert_abs_diff_eq!(p.position.norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p.curvature, 1.0);
            assert_abs_diff_eq!(p.inward_normal.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rectangle_edges_are_flat() {
        let pts = rect_2x1().boundary_sample(64).unwrap();
        assert_eq!(pts.len(), 64);
        assert!(pts.iter().filter(|p| !p.corner).all(|p| p.curvature == 0.0));
        assert_eq!(pts.iter().filter(|p| p.corner).count(), 4);
        let range = rect_2x1().curvature_range(64).unwrap();
        assert_eq!(range.min, 0.0);
        assert_eq!(range.corners, 4);
        assert_eq!(range.reflex_corners, 0);
    }

    #[test]
    fn ellipse_curvature_peaks_at_major_vertices() {
        let pts = Domain::ellipse(2.0, 1.0).unwrap().boundary_sample(256).unwrap();
        let best = pts
            .iter()
            .max_by(|a, b| a.curvature.total_cmp(&b.curvature))
            .unwrap();
        // closed form a/b² at (±a, 0)
        assert_abs_diff_eq!(best.curvature, 2.0, epsilon = 2e-3);
        assert_abs_diff_eq!(best.position.x.abs(), 2.0, epsilon = 1e-2);
        for p in &pts {
            assert_abs_diff_eq!(p.inward_normal.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn implicit_samples_are_equispaced() {
        let d = star();
        let n = 200;
        let pts = d.boundary_sample(n).unwrap();
        let (_, perimeter) = d.area_perimeter();
        let target = perimeter / n as f64;
        for i in 0..n {
            let gap = pts[i].position.dist(pts[(i + 1) % n].position);
            assert!((gap - target).abs() < 0.2 * target, "gap {gap} vs {target}");
        }
        // counterclockwise
        let loop_pts: Vec<Vec2> = pts.iter().map(|p| p.position).collect();
        assert!(shoelace(&loop_pts) > 0.0);
    }

    #[test]
    fn star_curvature_matches_polar_formula() {
        let range = star().curvature_range(1024).unwrap();
        // polar curvature (r² + 2r'² − r r'') / (r² + r'²)^{3/2}
        let kappa = |t: f64| {
            let r = 1.0 + 0.3 * (5.0 * t).cos();
            let r1 = -1.5 * (5.0 * t).sin();
            let r2 = -7.5 * (5.0 * t).cos();
            (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1).powf(1.5)
        };
        let oracle_min = (0..100_000)
            .map(|k| kappa(2.0 * PI * k as f64 / 100_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!(range.min < 0.0);
        assert!((range.min - oracle_min).abs() < 0.05 * oracle_min.abs());
    }

    #[test]
    fn diameters() {
        assert_eq!(Domain::unit_disk().diameter(), 2.0);
        assert_abs_diff_eq!(rect_2x1().diameter(), 5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(Domain::ellipse(2.0, 1.0).unwrap().diameter(), 4.0, epsilon = 1e-3);
        let d = star();
        assert!(d.diameter_with(256) <= d.diameter_with(1024) + 1e-12);
    }

    #[test]
    fn strip_widths() {
        let disk = Domain::unit_disk().strip_stats(90);
        assert_eq!(disk.min_width, 2.0);
        assert!(disk.width_by_direction.iter().all(|&(_, w)| w == 2.0));
        assert_abs_diff_eq!(rect_2x1().strip_stats(90).min_width, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            triangle().strip_stats(90).min_width,
            3f64.sqrt() / 2.0,
            epsilon = 1e-6
        );
        let s = star().strip_stats(180);
        assert!(s.min_width <= s.max_min_width_over_directions);
        assert!(s.width_by_direction.iter().all(|&(_, w)| w >= s.min_width));
    }

    #[test]
    fn areas_and_perimeters() {
        let (a, p) = Domain::unit_disk().area_perimeter();
        assert_abs_diff_eq!(a, PI);
        assert_abs_diff_eq!(p, 2.0 * PI);
        assert_eq!(rect_2x1().area_perimeter(), (2.0, 6.0));
        let (a, _) = star().area_perimeter();
        assert_abs_diff_eq!(a, PI * (1.0 + 0.3f64.powi(2) / 2.0), epsilon = 1e-3);
        // ellipse area πab
        let (a, _) = Domain::ellipse(2.0, 1.0).unwrap().area_perimeter();
        assert!((a - 2.0 * PI).abs() < 1e-4 * 2.0 * PI);
    }

    #[test]
    fn exterior_circles() {
        assert_abs_diff_eq!(
            Domain::unit_disk().exterior_circle_radius(256).unwrap(),
            1.0
        );
        let e = Domain::ellipse(2.0, 1.0).unwrap().exterior_circle_radius(512).unwrap();
        assert!((e - 0.5).abs() < 0.05, "ellipse radius {e}");
        let s = star().exterior_circle_radius(512).unwrap();
        assert!(s > 0.0);
    }

    #[test]
    fn reflex_polygon_corner_is_detected() {
        let l_shape = Domain::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 2.0),
            Vec2::new(0.0, 2.0),
        ])
        .unwrap();
        let r = l_shape.curvature_range(128).unwrap();
        assert_eq!(r.reflex_corners, 1);
        assert!(!r.is_convex());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(Domain::disk(Vec2::ZERO, -1.0).is_err());
        assert!(Domain::rectangle(Vec2::ZERO, 0.0, 1.0).is_err());
        let bowtie = Domain::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ]);
        assert!(matches!(bowtie, Err(DomainError::SelfIntersecting(..))));
        // annulus: rays from the center start outside
        let annulus = Domain::implicit(
            "annulus",
            BoundingBox {
                min: Vec2::new(-2.0, -2.0),
                max: Vec2::new(2.0, 2.0),
            },
            Vec2::new(1.5, 0.0),
            |p| (p.norm() - 1.5).abs() - 0.25,
        );
        assert!(matches!(annulus, Err(DomainError::TraceFailed { .. })));
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let d = Domain::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
        ])
        .unwrap();
        let v = d.polygon_vertices().unwrap();
        assert!(shoelace(&v) > 0.0);
        let pts = d.boundary_sample(16).unwrap();
        // inward normal at the midpoint of the bottom edge points up
        let bottom = pts
            .iter()
            .find(|p| p.position.y == 0.0 && !p.corner)
            .unwrap();
        assert_abs_diff_eq!(bottom.inward_normal.y, 1.0);
    }

    #[test]
    fn inradius_of_rectangle() {
        let r = rect_2x1().inradius_estimate();
        assert!((r - 0.5).abs() < 5e-3, "{r}");
        assert_eq!(Domain::unit_disk().inradius_estimate(), 1.0);
    }
}
