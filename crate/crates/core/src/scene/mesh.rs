//! Flat-panel discretizations of scatterer boundaries.
//!
//! Curves in the plane become chains of straight segments; closed surfaces
//! become flat triangles. Every panel carries its centroid (the collocation
//! point), its measure (length or area) and an outward normal.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Point;

/// Offset of the observation point from a flat segment, as a fraction of the
/// segment length, used for the regularized segment self-term.
pub const SEGMENT_SELF_OFFSET: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Circle {
        #[serde(with = "crate::scene::pt")]
        center: Point,
        radius: f64,
    },
    Acorn {
        #[serde(with = "crate::scene::pt")]
        center: Point,
        scale: f64,
    },
    Square {
        #[serde(with = "crate::scene::pt")]
        center: Point,
        scale: f64,
    },
    Kite {
        #[serde(with = "crate::scene::pt")]
        center: Point,
        scale: f64,
    },
    Sphere {
        #[serde(with = "crate::scene::pt")]
        center: Point,
        radius: f64,
    },
    Cube {
        #[serde(with = "crate::scene::pt")]
        center: Point,
        half_width: f64,
    },
}

impl ShapeSpec {
    pub fn dim(&self) -> usize {
        match self {
            ShapeSpec::Sphere { .. } | ShapeSpec::Cube { .. } => 3,
            _ => 2,
        }
    }

    pub fn center(&self) -> Point {
        match self {
            ShapeSpec::Circle { center, .. }
            | ShapeSpec::Acorn { center, .. }
            | ShapeSpec::Square { center, .. }
            | ShapeSpec::Kite { center, .. }
            | ShapeSpec::Sphere { center, .. }
            | ShapeSpec::Cube { center, .. } => *center,
        }
    }

    fn scale(&self) -> f64 {
        match self {
            ShapeSpec::Circle { radius, .. } | ShapeSpec::Sphere { radius, .. } => *radius,
            ShapeSpec::Acorn { scale, .. }
            | ShapeSpec::Square { scale, .. }
            | ShapeSpec::Kite { scale, .. } => *scale,
            ShapeSpec::Cube { half_width, .. } => *half_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.scale();
        if s > 0.0 && s.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidShape(format!(
                "scale parameter must be positive, got {s}"
            )))
        }
    }

    /// Closed parameterization of a planar boundary, `θ ∈ [0, 2π]`.
    pub fn curve_point(&self, theta: f64) -> Option<Point> {
        let (s, c) = theta.sin_cos();
        let (dx, dy) = match self {
            ShapeSpec::Circle { radius, .. } => (radius * c, radius * s),
            ShapeSpec::Acorn { scale, .. } => (
                scale * c * (17.0 / 4.0 + 2.0 * (3.0 * theta).cos()).sqrt(),
                scale * s * (17.0 / 4.0 + 2.0 * (3.0 * theta).sin()).sqrt(),
            ),
            ShapeSpec::Square { scale, .. } => {
                let (s3, c3) = (s * s * s, c * c * c);
                (scale * (s3 + s + c3 + c), scale * (s3 + s - c3 - c))
            }
            ShapeSpec::Kite { scale, .. } => (
                scale * (c + 0.65 * (2.0 * theta).cos() - 0.65),
                scale * 1.5 * s,
            ),
            _ => return None,
        };
        let o = self.center();
        Some(Point::new(o.x + dx, o.y + dy, 0.0))
    }

    /// Default discretization level for this shape.
    pub fn default_resolution(&self, point_like: bool) -> u32 {
        match self {
            ShapeSpec::Sphere { .. } => {
                if point_like {
                    1
                } else {
                    3
                }
            }
            ShapeSpec::Cube { .. } => {
                if point_like {
                    2
                } else {
                    8
                }
            }
            _ => {
                if point_like {
                    16
                } else {
                    256
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PanelShape {
    Segment([Point; 2]),
    Triangle([Point; 3]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub shape: PanelShape,
    pub centroid: Point,
    /// Length (segments) or area (triangles).
    pub measure: f64,
    pub normal: Point,
}

impl Panel {
    fn segment(a: Point, b: Point) -> Self {
        let t = b - a;
        Panel {
            shape: PanelShape::Segment([a, b]),
            centroid: (a + b) * 0.5,
            measure: t.norm(),
            normal: Point::new(t.y, -t.x, 0.0).normalize(),
        }
    }

    fn triangle(a: Point, b: Point, c: Point, outward_hint: Point) -> Self {
        let centroid = (a + b + c) / 3.0;
        let cross = (b - a).cross(&(c - a));
        let measure = 0.5 * cross.norm();
        let mut normal = cross.normalize();
        let mut verts = [a, b, c];
        if normal.dot(&(centroid - outward_hint)) < 0.0 {
            normal = -normal;
            verts.swap(1, 2);
        }
        Panel {
            shape: PanelShape::Triangle(verts),
            centroid,
            measure,
            normal,
        }
    }

    /// Largest distance between two vertices of the panel.
    pub fn size(&self) -> f64 {
        match &self.shape {
            PanelShape::Segment([a, b]) => (b - a).norm(),
            PanelShape::Triangle([a, b, c]) => (b - a).norm().max((c - b).norm()).max((a - c).norm()),
        }
    }

    /// `∫_panel ds_y / (4π|x_c - y|)` observed at the panel's own centroid.
    ///
    /// Triangles use the exact flat-triangle integral. Segments observe the
    /// flat segment from a perpendicular offset of
    /// `SEGMENT_SELF_OFFSET * length`, which regularizes the logarithmic
    /// singularity of a zero-thickness curve.
    pub fn self_integral(&self) -> f64 {
        match &self.shape {
            PanelShape::Segment(_) => {
                let half = 0.5 * self.measure;
                let delta = SEGMENT_SELF_OFFSET * self.measure;
                ((half + (half * half + delta * delta).sqrt()) / delta).ln() / (2.0 * PI)
            }
            PanelShape::Triangle(v) => triangle_inverse_distance(v, &self.centroid) / (4.0 * PI),
        }
    }
}

/// `∫_T dA / |x - y|` for a point `x` in the plane of the flat triangle `T`
/// (inside or on its closure). Sum over edges of `h (asinh(s₂/h) - asinh(s₁/h))`
/// where `h` is the distance from `x` to the edge line and `s₁, s₂` are the
/// signed edge-endpoint offsets from the foot of the perpendicular.
pub fn triangle_inverse_distance(v: &[Point; 3], x: &Point) -> f64 {
    let mut total = 0.0;
    for e in 0..3 {
        let a = v[e];
        let b = v[(e + 1) % 3];
        let edge = b - a;
        let len = edge.norm();
        if len == 0.0 {
            continue;
        }
        let dir = edge / len;
        let s1 = (a - x).dot(&dir);
        let s2 = (b - x).dot(&dir);
        let foot = a - dir * s1;
        let h = (foot - x).norm();
        if h <= 1e-14 * len {
            continue;
        }
        total += h * ((s2 / h).asinh() - (s1 / h).asinh());
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    pub dim: usize,
    pub panels: Vec<Panel>,
    /// Panel index ranges of the disconnected components.
    pub components: Vec<Range<usize>>,
    /// Measure-weighted mean of panel centroids.
    pub center: Point,
    /// Largest pairwise centroid distance.
    pub diameter: f64,
}

impl BoundaryMesh {
    fn from_panels(dim: usize, panels: Vec<Panel>, components: Vec<Range<usize>>) -> Result<Self> {
        if panels.is_empty() {
            return Err(Error::InvalidShape("mesh has no panels".into()));
        }
        if let Some(p) = panels.iter().find(|p| !(p.measure > 0.0)) {
            return Err(Error::InvalidShape(format!(
                "degenerate panel at {:?}",
                p.centroid
            )));
        }
        let center = weighted_center(&panels);
        let mut diameter = 0.0f64;
        for (i, a) in panels.iter().enumerate() {
            for b in &panels[i + 1..] {
                diameter = diameter.max((a.centroid - b.centroid).norm());
            }
        }
        Ok(BoundaryMesh {
            dim,
            panels,
            components,
            center,
            diameter,
        })
    }

    /// Union of several meshes as one multi-component mesh.
    pub fn combine(meshes: Vec<BoundaryMesh>) -> Result<Self> {
        let dim = meshes.first().map(|m| m.dim).unwrap_or(2);
        if meshes.iter().any(|m| m.dim != dim) {
            return Err(Error::Geometry("cannot combine meshes of different dimension".into()));
        }
        let mut panels = Vec::new();
        let mut components = Vec::new();
        for m in meshes {
            let off = panels.len();
            components.extend(m.components.iter().map(|r| r.start + off..r.end + off));
            panels.extend(m.panels);
        }
        Self::from_panels(dim, panels, components)
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.panels.iter().map(|p| p.measure).sum()
    }

    pub fn component_center(&self, k: usize) -> Point {
        weighted_center(&self.panels[self.components[k].clone()])
    }

    pub fn component_measure(&self, k: usize) -> f64 {
        self.panels[self.components[k].clone()]
            .iter()
            .map(|p| p.measure)
            .sum()
    }

    /// Largest distance from the component's centre to its panel vertices.
    pub fn component_radius(&self, k: usize) -> f64 {
        let c = self.component_center(k);
        self.panels[self.components[k].clone()]
            .iter()
            .flat_map(|p| match &p.shape {
                PanelShape::Segment(v) => v.to_vec(),
                PanelShape::Triangle(v) => v.to_vec(),
            })
            .map(|v| (v - c).norm())
            .fold(0.0, f64::max)
    }

    /// Distance from `x` to the nearest component's bounding ball
    /// (negative inside a ball).
    pub fn clearance(&self, x: &Point) -> f64 {
        (0..self.components.len())
            .map(|k| (x - self.component_center(k)).norm() - self.component_radius(k))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest panel size.
    pub fn panel_size(&self) -> f64 {
        self.panels.iter().map(Panel::size).fold(0.0, f64::max)
    }

    /// Smallest distance from `x` to any panel centroid.
    pub fn distance_to(&self, x: &Point) -> f64 {
        self.panels
            .iter()
            .map(|p| (p.centroid - x).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

fn weighted_center(panels: &[Panel]) -> Point {
    let total: f64 = panels.iter().map(|p| p.measure).sum();
    panels
        .iter()
        .fold(Point::zeros(), |acc, p| acc + p.centroid * p.measure)
        / total
}

/// Discretize `shape`. `resolution` is the segment count for planar curves
/// (≥ 8), the icosahedron subdivision level for spheres (≥ 1) and the number
/// of squares along each cube edge (≥ 1, two triangles per square).
pub fn build_boundary_mesh(shape: &ShapeSpec, resolution: u32) -> Result<BoundaryMesh> {
    shape.validate()?;
    match shape {
        ShapeSpec::Sphere { center, radius } => {
            if resolution < 1 {
                return Err(Error::InvalidShape("sphere needs at least one subdivision level".into()));
            }
            let panels = icosphere(*center, *radius, resolution);
            let n = panels.len();
            BoundaryMesh::from_panels(3, panels, vec![0..n])
        }
        ShapeSpec::Cube { center, half_width } => {
            if resolution < 1 {
                return Err(Error::InvalidShape("cube needs at least one square per edge".into()));
            }
            let panels = cube(*center, *half_width, resolution as usize);
            let n = panels.len();
            BoundaryMesh::from_panels(3, panels, vec![0..n])
        }
        _ => {
            if resolution < 8 {
                return Err(Error::InvalidShape("planar curves need at least 8 segments".into()));
            }
            let n = resolution as usize;
            let verts: Vec<Point> = (0..n)
                .map(|k| shape.curve_point(2.0 * PI * k as f64 / n as f64).unwrap())
                .collect();
            // Shoelace sign: flip the normals of clockwise curves.
            let area2: f64 = (0..n)
                .map(|k| {
                    let (a, b) = (verts[k], verts[(k + 1) % n]);
                    a.x * b.y - b.x * a.y
                })
                .sum();
            let panels = (0..n)
                .map(|k| {
                    let mut p = Panel::segment(verts[k], verts[(k + 1) % n]);
                    if area2 < 0.0 {
                        p.normal = -p.normal;
                    }
                    p
                })
                .collect();
            BoundaryMesh::from_panels(2, panels, vec![0..n])
        }
    }
}

fn icosphere(center: Point, radius: f64, level: u32) -> Vec<Panel> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Point> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Point>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    faces
        .iter()
        .map(|f| {
            let p = |i: usize| center + verts[i] * radius;
            Panel::triangle(p(f[0]), p(f[1]), p(f[2]), center)
        })
        .collect()
}

fn cube(center: Point, half: f64, n: usize) -> Vec<Panel> {
    let mut panels = Vec::with_capacity(12 * n * n);
    let step = 2.0 * half / n as f64;
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let (u_ax, v_ax) = ((axis + 1) % 3, (axis + 2) % 3);
            let corner = |i: usize, j: usize| {
                let mut p = Point::zeros();
                p[axis] = sign * half;
                p[u_ax] = -half + i as f64 * step;
                p[v_ax] = -half + j as f64 * step;
                center + p
            };
            for i in 0..n {
                for j in 0..n {
                    let (a, b, c, d) = (
                        corner(i, j),
                        corner(i + 1, j),
                        corner(i + 1, j + 1),
                        corner(i, j + 1),
                    );
                    panels.push(Panel::triangle(a, b, c, center));
                    panels.push(Panel::triangle(a, c, d, center));
                }
            }
        }
    }
    panels
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circle(r: f64) -> ShapeSpec {
        ShapeSpec::Circle {
            center: Point::zeros(),
            radius: r,
        }
    }

    #[test]
    fn circle_circumference() {
        let m = build_boundary_mesh(&circle(10.0), 256).unwrap();
        assert_relative_eq!(m.total_measure(), 2.0 * PI * 10.0, max_relative = 1e-3);
        assert!(m.center.norm() < 1e-12);
        assert_relative_eq!(m.diameter, 20.0, epsilon = m.panel_size());
        for p in &m.panels {
            assert!(p.normal.dot(&p.centroid) > 0.0, "normal must point outward");
        }
    }

    #[test]
    fn sphere_area_and_counts() {
        let sphere = ShapeSpec::Sphere {
            center: Point::new(1.0, 2.0, 3.0),
            radius: 11.0,
        };
        let m = build_boundary_mesh(&sphere, 3).unwrap();
        assert_eq!(m.len(), 1280);
        assert_relative_eq!(m.total_measure(), 4.0 * PI * 121.0, max_relative = 1e-2);
        assert!((m.center - Point::new(1.0, 2.0, 3.0)).norm() < 1e-9);
        for p in &m.panels {
            assert!(p.normal.dot(&(p.centroid - Point::new(1.0, 2.0, 3.0))) > 0.0);
        }
    }

    #[test]
    fn cube_default_has_768_triangles() {
        let cube = ShapeSpec::Cube {
            center: Point::zeros(),
            half_width: 11.0,
        };
        let m = build_boundary_mesh(&cube, 8).unwrap();
        assert_eq!(m.len(), 768);
        assert_relative_eq!(m.total_measure(), 6.0 * 22.0 * 22.0, max_relative = 1e-12);
    }

    #[test]
    fn kite_center_converges() {
        let kite = ShapeSpec::Kite {
            center: Point::new(15.0, 15.0, 0.0),
            scale: 6.0,
        };
        let coarse = build_boundary_mesh(&kite, 512).unwrap();
        let fine = build_boundary_mesh(&kite, 4096).unwrap();
        assert!((coarse.center - fine.center).norm() < 0.1);
    }

    #[test]
    fn curves_close_and_refinement_converges() {
        for shape in [
            circle(3.0),
            ShapeSpec::Acorn {
                center: Point::zeros(),
                scale: 6.0,
            },
            ShapeSpec::Square {
                center: Point::new(-8.0, -8.0, 0.0),
                scale: 3.0 * 2f64.sqrt(),
            },
            ShapeSpec::Kite {
                center: Point::zeros(),
                scale: 6.0,
            },
        ] {
            let a = shape.curve_point(0.0).unwrap();
            let b = shape.curve_point(2.0 * PI).unwrap();
            assert!((a - b).norm() < 1e-12);
            let lengths: Vec<f64> = [256u32, 512, 1024]
                .iter()
                .map(|&n| build_boundary_mesh(&shape, n).unwrap().total_measure())
                .collect();
            assert!((lengths[2] / lengths[1] - 1.0).abs() < 1e-3);
            assert!((lengths[2] / lengths[1] - 1.0).abs() <= (lengths[1] / lengths[0] - 1.0).abs());
        }
    }

    #[test]
    fn rejects_nonpositive_scale_and_low_resolution() {
        assert!(matches!(
            build_boundary_mesh(&circle(0.0), 64),
            Err(Error::InvalidShape(_))
        ));
        assert!(build_boundary_mesh(&circle(1.0), 4).is_err());
    }

    /// Polar quadrature around an interior point `x`: `∫_T 1/r dA = ∫ ρ(θ) dθ`
    /// with `ρ` the distance from `x` to the boundary along direction `θ`.
    fn brute_triangle_integral(v: &[Point; 3], x: &Point, n: usize) -> f64 {
        let e1 = (v[1] - v[0]).normalize();
        let nrm = (v[1] - v[0]).cross(&(v[2] - v[0])).normalize();
        let e2 = nrm.cross(&e1);
        let mut total = 0.0;
        for k in 0..n {
            let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            let d = e1 * th.cos() + e2 * th.sin();
            let mut rho = f64::INFINITY;
            for e in 0..3 {
                let a = v[e];
                let b = v[(e + 1) % 3];
                // Solve x + s d = a + w (b - a).
                let m = nalgebra::Matrix2::new(
                    d.dot(&e1),
                    -(b - a).dot(&e1),
                    d.dot(&e2),
                    -(b - a).dot(&e2),
                );
                if let Some(inv) = m.try_inverse() {
                    let rhs = nalgebra::Vector2::new((a - x).dot(&e1), (a - x).dot(&e2));
                    let sol = inv * rhs;
                    if sol[0] > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&sol[1]) {
                        rho = rho.min(sol[0]);
                    }
                }
            }
            total += rho * 2.0 * PI / n as f64;
        }
        total
    }

    #[test]
    fn triangle_self_integral_matches_polar_quadrature() {
        let tris = [
            [
                Point::new(0.0, 0.0, 0.0),
                Point::new(1.0, 0.0, 0.0),
                Point::new(0.5, 3f64.sqrt() / 2.0, 0.0),
            ],
            [
                Point::new(0.2, -0.1, 0.3),
                Point::new(1.7, 0.4, -0.2),
                Point::new(0.1, 0.9, 0.8),
            ],
        ];
        for v in &tris {
            let c = (v[0] + v[1] + v[2]) / 3.0;
            let exact = triangle_inverse_distance(v, &c);
            let brute = brute_triangle_integral(v, &c, 200_000);
            assert_relative_eq!(exact, brute, max_relative = 1e-6);
        }
        // Equilateral unit triangle at its centroid: 6 h asinh(1/(2h)), h = 1/(2√3).
        let h = 1.0 / (2.0 * 3f64.sqrt());
        let c = (tris[0][0] + tris[0][1] + tris[0][2]) / 3.0;
        assert_relative_eq!(
            triangle_inverse_distance(&tris[0], &c),
            6.0 * h * (0.5 / h).asinh(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn segment_self_term_formula() {
        let m = build_boundary_mesh(&circle(10.0), 256).unwrap();
        let p = &m.panels[0];
        assert_relative_eq!(p.self_integral(), 5f64.asinh() / (2.0 * PI), max_relative = 1e-12);
    }
}
