//! Convex planar domains, random inclusion pairs, and triangulation.

mod mesh;
mod mesher;
mod pairs;
mod rng;

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::{Error, Result};

pub use mesh::{BoundaryEdge, DirichletSelector, Marker, Mesh};
pub use mesher::triangulate;
pub use pairs::{convex_hull, inclusion_pair, strip_pair, InclusionPair, MIN_PAIR_AREA};
pub use rng::XorShift64Star;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Twice the signed area of (a, b, c); positive when counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Parametric description of a convex planar domain. Angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    /// Vertices (±D/2, 0), (0, ±(D/2) tan θ).
    Rhombus { diameter: f64, theta: f64 },
    /// Upper half of the rhombus, cut along the long diagonal; `base_marker`
    /// is the condition on that diagonal.
    HalfRhombus { diameter: f64, theta: f64, base_marker: Marker },
    Rectangle { a: f64, b: f64 },
    Square { side: f64 },
    EquilateralTriangle { side: f64 },
    RegularPolygon { n_vertices: usize, circumradius: f64 },
    /// Apex at the origin, symmetric about the positive x-axis.
    Sector { radius: f64, opening: f64, n_arc: usize },
    ReuleauxTriangle { width: f64, n_arc: usize },
    ConvexHullPolygon { vertices: Vec<Point> },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Geometry(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Rhombus { diameter, theta } | Self::HalfRhombus { diameter, theta, .. } => {
                positive("diameter", *diameter)?;
                if !(*theta > 0.0 && *theta < PI / 2.0) {
                    return Err(Error::Geometry(format!("theta {theta} outside (0, pi/2)")));
                }
            }
            Self::Rectangle { a, b } => {
                positive("a", *a)?;
                positive("b", *b)?;
            }
            Self::Square { side } | Self::EquilateralTriangle { side } => positive("side", *side)?,
            Self::RegularPolygon { n_vertices, circumradius } => {
                positive("circumradius", *circumradius)?;
                if *n_vertices < 3 {
                    return Err(Error::Geometry("regular polygon needs >= 3 vertices".into()));
                }
            }
            Self::Sector { radius, opening, n_arc } => {
                positive("radius", *radius)?;
                // Beyond π the sector is non-convex; at π the apex is flat.
                if !(*opening > 0.0 && *opening < PI) {
                    return Err(Error::Geometry(format!("opening {opening} outside (0, pi)")));
                }
                if *n_arc < 1 {
                    return Err(Error::Geometry("too few arc chords".into()));
                }
            }
            Self::ReuleauxTriangle { width, n_arc } => {
                positive("width", *width)?;
                if *n_arc < 1 {
                    return Err(Error::Geometry("n_arc must be >= 1".into()));
                }
            }
            Self::ConvexHullPolygon { vertices } => {
                Polygon::new(vertices.clone())?;
            }
        }
        Ok(())
    }

    /// The same domain dilated by `c` about the origin.
    pub fn scaled(&self, c: f64) -> DomainSpec {
        match self.clone() {
            Self::Rhombus { diameter, theta } => Self::Rhombus { diameter: diameter * c, theta },
            Self::HalfRhombus { diameter, theta, base_marker } => {
                Self::HalfRhombus { diameter: diameter * c, theta, base_marker }
            }
            Self::Rectangle { a, b } => Self::Rectangle { a: a * c, b: b * c },
            Self::Square { side } => Self::Square { side: side * c },
            Self::EquilateralTriangle { side } => Self::EquilateralTriangle { side: side * c },
            Self::RegularPolygon { n_vertices, circumradius } => {
                Self::RegularPolygon { n_vertices, circumradius: circumradius * c }
            }
            Self::Sector { radius, opening, n_arc } => Self::Sector { radius: radius * c, opening, n_arc },
            Self::ReuleauxTriangle { width, n_arc } => Self::ReuleauxTriangle { width: width * c, n_arc },
            Self::ConvexHullPolygon { vertices } => {
                Self::ConvexHullPolygon { vertices: vertices.into_iter().map(|p| p * c).collect() }
            }
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rhombus { diameter, theta } => {
                write!(f, "rhombus(D={diameter}, theta={:.4}deg)", theta.to_degrees())
            }
            Self::HalfRhombus { diameter, theta, base_marker } => write!(
                f,
                "half_rhombus(D={diameter}, theta={:.4}deg, base={})",
                theta.to_degrees(),
                base_marker.code()
            ),
            Self::Rectangle { a, b } => write!(f, "rectangle({a}x{b})"),
            Self::Square { side } => write!(f, "square({side})"),
            Self::EquilateralTriangle { side } => write!(f, "equilateral_triangle({side})"),
            Self::RegularPolygon { n_vertices, circumradius } => {
                write!(f, "regular_polygon(n={n_vertices}, R={circumradius})")
            }
            Self::Sector { radius, opening, n_arc } => {
                write!(f, "sector(R={radius}, opening={opening:.6}, n_arc={n_arc})")
            }
            Self::ReuleauxTriangle { width, n_arc } => write!(f, "reuleaux(w={width}, n_arc={n_arc})"),
            Self::ConvexHullPolygon { vertices } => write!(f, "polygon({} vertices)", vertices.len()),
        }
    }
}

/// Counterclockwise convex polygon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Checks strict convexity and counterclockwise order.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Geometry(format!("polygon needs >= 3 vertices, got {n}")));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Geometry("non-finite vertex".into()));
        }
        let scale = vertices.iter().map(|p| p.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if orient(a, b, c) <= 1e-14 * scale * scale {
                return Err(Error::Geometry(format!(
                    "vertices not strictly convex counterclockwise at index {}",
                    (i + 1) % n
                )));
            }
        }
        let poly = Self { vertices };
        // A star polygon can pass the local test; its turning number exceeds one.
        let turning: f64 = (0..n)
            .map(|i| {
                let (a, b, c) = (poly.vertices[i], poly.vertices[(i + 1) % n], poly.vertices[(i + 2) % n]);
                let (u, v) = (b - a, c - b);
                u.cross(v).atan2(u.dot(v))
            })
            .sum();
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::Geometry("polygon winds more than once".into()));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices).expect("polygon has >= 3 vertices")
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (p, q) = self.edge(i);
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
            a2 += w;
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    /// Smallest signed margin of `p` against the edge half-planes, in
    /// length units; ≥ 0 means inside or on the boundary.
    pub fn margin(&self, p: Point) -> f64 {
        (0..self.vertices.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                orient(a, b, p) / a.dist(b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.margin(p) >= 0.0
    }
}

/// Shoelace area of a counterclockwise vertex loop.
pub fn area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum::<f64>()
}

/// Largest pairwise vertex distance (the diameter of the convex hull).
pub fn diameter(vertices: &[Point]) -> Result<f64> {
    if vertices.len() < 2 {
        return Err(Error::Geometry("diameter needs >= 2 points".into()));
    }
    let mut best = 0.0f64;
    for (i, &p) in vertices.iter().enumerate() {
        for &q in &vertices[i + 1..] {
            best = best.max(p.dist(q));
        }
    }
    Ok(best)
}

fn arc(center: Point, radius: f64, from: f64, to: f64, chords: usize, include_end: bool) -> Vec<Point> {
    let end = if include_end { chords } else { chords - 1 };
    (0..=end)
        .map(|i| {
            let t = from + (to - from) * i as f64 / chords as f64;
            center + Point::new(t.cos(), t.sin()) * radius
        })
        .collect()
}

/// Counterclockwise polygon for `spec`. Curved boundaries are replaced by
/// inscribed chords, so the polygon lies inside the true domain.
pub fn build(spec: &DomainSpec) -> Result<Polygon> {
    spec.validate()?;
    let pts = match spec {
        DomainSpec::Rhombus { diameter, theta } => {
            let (h, m) = (0.5 * diameter, 0.5 * diameter * theta.tan());
            vec![Point::new(-h, 0.0), Point::new(0.0, -m), Point::new(h, 0.0), Point::new(0.0, m)]
        }
        DomainSpec::HalfRhombus { diameter, theta, .. } => {
            let (h, m) = (0.5 * diameter, 0.5 * diameter * theta.tan());
            vec![Point::new(-h, 0.0), Point::new(h, 0.0), Point::new(0.0, m)]
        }
        DomainSpec::Rectangle { a, b } => {
            vec![Point::new(0.0, 0.0), Point::new(*a, 0.0), Point::new(*a, *b), Point::new(0.0, *b)]
        }
        DomainSpec::Square { side } => {
            let s = *side;
            vec![Point::new(0.0, 0.0), Point::new(s, 0.0), Point::new(s, s), Point::new(0.0, s)]
        }
        DomainSpec::EquilateralTriangle { side } => {
            let s = *side;
            vec![Point::new(0.0, 0.0), Point::new(s, 0.0), Point::new(0.5 * s, 0.5 * s * 3f64.sqrt())]
        }
        DomainSpec::RegularPolygon { n_vertices, circumradius } => {
            arc(Point::default(), *circumradius, 0.0, 2.0 * PI, *n_vertices, false)
        }
        DomainSpec::Sector { radius, opening, n_arc } => {
            let mut v = vec![Point::default()];
            v.extend(arc(Point::default(), *radius, -0.5 * opening, 0.5 * opening, *n_arc, true));
            v
        }
        DomainSpec::ReuleauxTriangle { width, n_arc } => {
            let w = *width;
            let a = Point::new(-0.5 * w, 0.0);
            let b = Point::new(0.5 * w, 0.0);
            let c = Point::new(0.0, 0.5 * w * 3f64.sqrt());
            let third = PI / 3.0;
            let mut v = arc(c, w, 4.0 * third, 5.0 * third, *n_arc, false);
            v.extend(arc(a, w, 0.0, third, *n_arc, false));
            v.extend(arc(b, w, 2.0 * third, 3.0 * third, *n_arc, false));
            v
        }
        DomainSpec::ConvexHullPolygon { vertices } => vertices.clone(),
    };
    Polygon::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhombus_at_quarter_pi_is_rotated_square() {
        let p = build(&DomainSpec::Rhombus { diameter: 2.0, theta: PI / 4.0 }).unwrap();
        let want = [(-1.0, 0.0), (0.0, -1.0), (1.0, 0.0), (0.0, 1.0)];
        for (v, w) in p.vertices().iter().zip(want) {
            assert!((v.x - w.0).abs() < 1e-15 && (v.y - w.1).abs() < 1e-15);
        }
        assert!((p.area() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diameters_and_areas() {
        let sq = build(&DomainSpec::Square { side: 2f64.sqrt() }).unwrap();
        assert!((sq.diameter() - 2.0).abs() < 1e-15);
        let rh = build(&DomainSpec::Rhombus { diameter: 2.0, theta: 0.3 }).unwrap();
        assert_eq!(rh.diameter(), 2.0);
        assert!((rh.area() - 2.0 * 0.3f64.tan()).abs() < 1e-15);
        let unit = build(&DomainSpec::Square { side: 1.0 }).unwrap();
        assert_eq!(unit.area(), 1.0);
        let p = build(&DomainSpec::RegularPolygon { n_vertices: 64, circumradius: 1.0 }).unwrap();
        let d = p.diameter();
        assert!(d <= 2.0 + 1e-15 && d >= 2.0 * (PI / 64.0).cos());
        let p = build(&DomainSpec::RegularPolygon { n_vertices: 256, circumradius: 1.0 }).unwrap();
        assert!((p.area() - PI).abs() < 1e-3);
        assert!((p.area() - 128.0 * (2.0 * PI / 256.0).sin()).abs() < 1e-13);
    }

    #[test]
    fn reuleaux_has_constant_width() {
        let p = build(&DomainSpec::ReuleauxTriangle { width: 2.0, n_arc: 64 }).unwrap();
        assert_eq!(p.len(), 192);
        let d = p.diameter();
        assert!((d - 2.0).abs() < 1e-14);
        for (i, a) in p.vertices().iter().enumerate() {
            for b in &p.vertices()[i + 1..] {
                assert!(a.dist(*b) <= 2.0 + 1e-14);
            }
        }
    }

    #[test]
    fn sector_is_inscribed() {
        let p = build(&DomainSpec::Sector { radius: 1.0, opening: PI / 3.0, n_arc: 32 }).unwrap();
        assert_eq!(p.len(), 34);
        for v in &p.vertices()[1..] {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
        assert!(build(&DomainSpec::Sector { radius: 1.0, opening: 4.0, n_arc: 32 }).is_err());
    }

    #[test]
    fn rejects_bad_polygons() {
        let cw = vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)];
        assert!(Polygon::new(cw).is_err());
        let collinear = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert!(Polygon::new(collinear).is_err());
        assert!(diameter(&[Point::default()]).is_err());
        assert!(DomainSpec::Rhombus { diameter: 2.0, theta: 2.0 }.validate().is_err());
    }
}
