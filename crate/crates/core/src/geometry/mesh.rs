use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{orient, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Marker {
    Neumann,
    Dirichlet,
}

impl Marker {
    pub fn code(self) -> char {
        match self {
            Marker::Neumann => 'N',
            Marker::Dirichlet => 'D',
        }
    }
}

/// Oriented as in its triangle, so the domain lies to the left of a → b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub marker: Marker,
}

/// Which boundary edges carry Dirichlet conditions. Matching is geometric and
/// done against the domain polygon before meshing, so refined sub-edges of
/// inscribed chords inherit the marker of their chord.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub enum DirichletSelector {
    #[default]
    None,
    All,
    /// Edges lying on the closed segment a–b.
    OnSegment { a: Point, b: Point },
    /// Edges with both endpoints on the circle.
    OnCircle { center: Point, radius: f64 },
}

impl DirichletSelector {
    pub fn matches(&self, p: Point, q: Point, tol: f64) -> bool {
        match *self {
            DirichletSelector::None => false,
            DirichletSelector::All => true,
            DirichletSelector::OnSegment { a, b } => {
                segment_distance(p, a, b) <= tol && segment_distance(q, a, b) <= tol
            }
            DirichletSelector::OnCircle { center, radius } => {
                (p.dist(center) - radius).abs() <= tol && (q.dist(center) - radius).abs() <= tol
            }
        }
    }
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    let t = if len2 > 0.0 { ((p - a).dot(d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(a + d * t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    /// Longest edge.
    pub h: f64,
}

impl Mesh {
    /// Extracts the boundary (all Neumann) and validates.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        let boundary = boundary_edges(&triangles)?
            .into_iter()
            .map(|(a, b)| BoundaryEdge { a, b, marker: Marker::Neumann })
            .collect();
        let mut mesh = Mesh { vertices, triangles, boundary, h: 0.0 };
        mesh.h = mesh.max_edge_length();
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn max_edge_length(&self) -> f64 {
        let v = &self.vertices;
        self.triangles
            .iter()
            .flat_map(|t| [v[t[0]].dist(v[t[1]]), v[t[1]].dist(v[t[2]]), v[t[2]].dist(v[t[0]])])
            .fold(0.0, f64::max)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn dirichlet_edge_count(&self) -> usize {
        self.boundary.iter().filter(|e| e.marker == Marker::Dirichlet).count()
    }

    /// Sorted vertices touched by a Dirichlet edge.
    pub fn dirichlet_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| e.marker == Marker::Dirichlet)
            .flat_map(|e| [e.a, e.b])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if self.triangles.is_empty() {
            return Err(Error::Geometry("mesh has no triangles".into()));
        }
        if self.vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Geometry("non-finite mesh vertex".into()));
        }
        let h = self.max_edge_length();
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Geometry(format!("triangle {i} has invalid vertex indices")));
            }
            let area = self.triangle_area(i);
            if area <= 1e-14 * h * h {
                return Err(Error::DegenerateTriangle { index: i, area });
            }
        }
        let expected = boundary_edges(&self.triangles)?;
        let mut have: Vec<(usize, usize)> = self.boundary.iter().map(|e| (e.a, e.b)).collect();
        have.sort_unstable();
        let mut want = expected;
        want.sort_unstable();
        if have != want {
            return Err(Error::Geometry("boundary edges do not match the triangulation".into()));
        }
        // Closed loops: each boundary vertex has one outgoing and one incoming edge.
        let mut out_deg: HashMap<usize, (u32, u32)> = HashMap::new();
        for e in &self.boundary {
            out_deg.entry(e.a).or_default().0 += 1;
            out_deg.entry(e.b).or_default().1 += 1;
        }
        if out_deg.values().any(|&(o, i)| o != 1 || i != 1) {
            return Err(Error::Geometry("boundary edges do not form closed simple loops".into()));
        }
        Ok(())
    }

    /// Gives each boundary edge the marker of the polygon side it lies on.
    pub(crate) fn mark_by_sides(&mut self, sides: &[(Point, Point, Marker)]) -> Result<()> {
        let tol = 1e-9 * self.h.max(f64::MIN_POSITIVE);
        for e in &mut self.boundary {
            let (p, q) = (self.vertices[e.a], self.vertices[e.b]);
            let side = sides
                .iter()
                .find(|(a, b, _)| segment_distance(p, *a, *b) <= tol && segment_distance(q, *a, *b) <= tol)
                .ok_or_else(|| Error::Geometry("boundary edge off the domain polygon".into()))?;
            e.marker = side.2;
        }
        Ok(())
    }

    /// Red refinement: every triangle is split into four by its edge
    /// midpoints. Boundary edges split in two and keep their marker.
    pub fn refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * self.triangles.len() / 2);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                vertices.push(vertices[key.0].midpoint(vertices[key.1]));
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut boundary = Vec::with_capacity(2 * self.boundary.len());
        for e in &self.boundary {
            let m = midpoint(e.a, e.b, &mut vertices);
            boundary.push(BoundaryEdge { a: e.a, b: m, marker: e.marker });
            boundary.push(BoundaryEdge { a: m, b: e.b, marker: e.marker });
        }
        let mut mesh = Mesh { vertices, triangles, boundary, h: 0.0 };
        mesh.h = mesh.max_edge_length();
        mesh
    }

    /// The same mesh with every coordinate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|&p| p * c).collect(),
            triangles: self.triangles.clone(),
            boundary: self.boundary.clone(),
            h: self.h * c,
        }
    }

    /// Text export: "nv nt nb", then "x y", "i j k", "i j N|D" lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.triangles.len(), self.boundary.len());
        for p in &self.vertices {
            // {:?} round-trips f64 exactly.
            let _ = writeln!(s, "{:?} {:?}", p.x, p.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for e in &self.boundary {
            let _ = writeln!(s, "{} {} {}", e.a, e.b, e.marker.code());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("mesh text: missing {what}")));
        let header: Vec<usize> = parse_fields(next("header")?)?;
        let [nv, nt, nb] = header[..] else {
            return Err(Error::Parse("mesh header must be \"nv nt nb\"".into()));
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let f: Vec<f64> = parse_fields(next("vertex")?)?;
            let [x, y] = f[..] else { return Err(Error::Parse("vertex line must be \"x y\"".into())) };
            vertices.push(Point::new(x, y));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let f: Vec<usize> = parse_fields(next("triangle")?)?;
            let [i, j, k] = f[..] else { return Err(Error::Parse("triangle line must be \"i j k\"".into())) };
            triangles.push([i, j, k]);
        }
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let line = next("boundary edge")?;
            let f: Vec<&str> = line.split_whitespace().collect();
            let [a, b, m] = f[..] else { return Err(Error::Parse("boundary line must be \"i j N|D\"".into())) };
            let marker = match m {
                "N" => Marker::Neumann,
                "D" => Marker::Dirichlet,
                other => return Err(Error::Parse(format!("unknown marker {other:?}"))),
            };
            let a = a.parse().map_err(|_| Error::Parse(format!("bad index {a:?}")))?;
            let b = b.parse().map_err(|_| Error::Parse(format!("bad index {b:?}")))?;
            boundary.push(BoundaryEdge { a, b, marker });
        }
        if next("end").is_ok() {
            return Err(Error::Parse("trailing data after mesh".into()));
        }
        let mut mesh = Mesh { vertices, triangles, boundary, h: 0.0 };
        mesh.h = mesh.max_edge_length();
        mesh.validate()?;
        Ok(mesh)
    }
}

fn parse_fields<T: std::str::FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|f| f.parse().map_err(|_| Error::Parse(format!("bad field {f:?} in {line:?}"))))
        .collect()
}

/// Edges used by exactly one triangle, oriented as in that triangle, in
/// sorted order. Errors on edges shared by more than two triangles or
/// shared with inconsistent orientation.
fn boundary_edges(triangles: &[[usize; 3]]) -> Result<Vec<(usize, usize)>> {
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * triangles.len());
    for t in triangles {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            edges.push((a.min(b), a.max(b), a, b));
        }
    }
    edges.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < edges.len() {
        let mut j = i + 1;
        while j < edges.len() && edges[j].0 == edges[i].0 && edges[j].1 == edges[i].1 {
            j += 1;
        }
        match j - i {
            1 => out.push((edges[i].2, edges[i].3)),
            2 if edges[i].2 != edges[i + 1].2 => {}
            _ => {
                return Err(Error::Geometry(format!(
                    "edge ({}, {}) is not manifold or inconsistently oriented",
                    edges[i].0, edges[i].1
                )))
            }
        }
        i = j;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Mesh {
        let v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        Mesh::from_triangles(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn boundary_of_two_triangle_square() {
        let m = unit_square();
        assert_eq!(m.boundary.len(), 4);
        assert!(m.boundary.iter().all(|e| e.marker == Marker::Neumann));
        assert!((m.h - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn refinement_counts() {
        let m = unit_square();
        let r = m.refine();
        assert_eq!(r.triangles.len(), 8);
        assert_eq!(r.boundary.len(), 8);
        assert_eq!(r.vertices.len(), 9);
        r.validate().unwrap();
        assert_eq!(r.h, m.h / 2.0);
        assert!((r.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let mut m = unit_square().refine();
        m.boundary[0].marker = Marker::Dirichlet;
        m.vertices[4].x += 1e-3;
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(Mesh::from_text("1 0 0\n0 0\n").is_err());
        assert!(Mesh::from_text(&m.to_text().replace(" D", " X")).is_err());
    }

    #[test]
    fn rejects_clockwise_and_degenerate() {
        let v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert!(matches!(
            Mesh::from_triangles(v.clone(), vec![[0, 2, 1]]),
            Err(Error::DegenerateTriangle { .. })
        ));
        let flat = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert!(Mesh::from_triangles(flat, vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn selector_geometry() {
        let s = DirichletSelector::OnSegment { a: Point::new(0.0, 0.0), b: Point::new(1.0, 0.0) };
        assert!(s.matches(Point::new(0.2, 0.0), Point::new(0.7, 0.0), 1e-12));
        assert!(!s.matches(Point::new(0.2, 0.0), Point::new(1.7, 0.0), 1e-12));
        let c = DirichletSelector::OnCircle { center: Point::default(), radius: 1.0 };
        assert!(c.matches(Point::new(1.0, 0.0), Point::new(0.0, 1.0), 1e-12));
        assert!(!c.matches(Point::new(0.0, 0.0), Point::new(0.0, 1.0), 1e-12));
    }
}
