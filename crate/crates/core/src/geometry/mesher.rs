use std::collections::HashMap;

use super::mesh::{DirichletSelector, Marker, Mesh};
use super::{build, orient, DomainSpec, Point, Polygon};
use crate::{Error, Result};

/// Meshes `spec` with longest edge ≤ `target_h`.
///
/// Rhombi and rectangles get the affine image of a structured square grid,
/// triangles a structured subdivision (obtuse ones are first cut at the
/// altitude foot), and everything else a Delaunay mesh of boundary points
/// plus a triangular lattice, refined uniformly if still too coarse.
/// Markers are assigned per polygon side before refinement and inherited.
pub fn triangulate(spec: &DomainSpec, target_h: f64, selector: &DirichletSelector) -> Result<Mesh> {
    if !(target_h.is_finite() && target_h > 0.0) {
        return Err(Error::Geometry(format!("target_h must be positive, got {target_h}")));
    }
    let poly = build(spec)?;
    let sides = side_markers(spec, &poly, selector)?;
    let mut mesh = match spec {
        DomainSpec::Rhombus { .. } => {
            let v = poly.vertices();
            parallelogram(v[0], v[1] - v[0], v[3] - v[0], target_h, true)?
        }
        DomainSpec::Rectangle { .. } | DomainSpec::Square { .. } => {
            let v = poly.vertices();
            parallelogram(v[0], v[1] - v[0], v[3] - v[0], target_h, false)?
        }
        _ if poly.len() == 3 => structured_triangle(&poly, target_h)?,
        _ => delaunay(&poly, target_h)?,
    };
    mesh.mark_by_sides(&sides)?;
    while mesh.h > target_h {
        mesh = mesh.refine();
    }
    Ok(mesh)
}

fn side_markers(
    spec: &DomainSpec,
    poly: &Polygon,
    selector: &DirichletSelector,
) -> Result<Vec<(Point, Point, Marker)>> {
    let tol = 1e-9 * poly.diameter();
    let mut any = false;
    let sides = (0..poly.len())
        .map(|i| {
            let (a, b) = poly.edge(i);
            let mut m = Marker::Neumann;
            if let DomainSpec::HalfRhombus { base_marker, .. } = spec {
                if i == 0 {
                    m = *base_marker;
                }
            }
            if selector.matches(a, b, tol) {
                m = Marker::Dirichlet;
                any = true;
            }
            (a, b, m)
        })
        .collect();
    if *selector != DirichletSelector::None && !any {
        return Err(Error::Geometry(format!("dirichlet selector {selector:?} matches no boundary edge")));
    }
    Ok(sides)
}

/// Grid on o + s·e1 + t·e2, cells cut along the shorter diagonal when
/// `short_diagonal`, else along e2 − e1.
fn parallelogram(o: Point, e1: Point, e2: Point, target_h: f64, short_diagonal: bool) -> Result<Mesh> {
    let anti = (e2 - e1).norm();
    let main = (e1 + e2).norm();
    let use_main = short_diagonal && main < anti;
    let (n1, n2) = if short_diagonal {
        let n = ((e1.norm().max(e2.norm()).max(anti.min(main))) / target_h).ceil().max(1.0) as usize;
        (n, n)
    } else {
        let c = target_h / std::f64::consts::SQRT_2;
        ((e1.norm() / c).ceil().max(1.0) as usize, (e2.norm() / c).ceil().max(1.0) as usize)
    };
    let mut vertices = Vec::with_capacity((n1 + 1) * (n2 + 1));
    for j in 0..=n2 {
        for i in 0..=n1 {
            vertices.push(o + e1 * (i as f64 / n1 as f64) + e2 * (j as f64 / n2 as f64));
        }
    }
    let id = |i: usize, j: usize| j * (n1 + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n1 * n2);
    for j in 0..n2 {
        for i in 0..n1 {
            let (p00, p10, p01, p11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            if use_main {
                triangles.push([p00, p10, p11]);
                triangles.push([p00, p11, p01]);
            } else {
                triangles.push([p00, p10, p01]);
                triangles.push([p10, p11, p01]);
            }
        }
    }
    Mesh::from_triangles(vertices, triangles)
}

/// Merges points closer than `tol`, so patches sharing an edge conform.
struct VertexPool {
    points: Vec<Point>,
    grid: HashMap<(i64, i64), usize>,
    tol: f64,
}

impl VertexPool {
    fn new(tol: f64) -> Self {
        Self { points: Vec::new(), grid: HashMap::new(), tol }
    }

    fn insert(&mut self, p: Point) -> usize {
        let key = ((p.x / self.tol).round() as i64, (p.y / self.tol).round() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&i) = self.grid.get(&(key.0 + dx, key.1 + dy)) {
                    if self.points[i].dist(p) <= self.tol {
                        return i;
                    }
                }
            }
        }
        self.points.push(p);
        self.grid.insert(key, self.points.len() - 1);
        self.points.len() - 1
    }
}

fn subdivide_triangle(pool: &mut VertexPool, tris: &mut Vec<[usize; 3]>, a: Point, b: Point, c: Point, n: usize) {
    let mut id = vec![vec![0usize; n + 1]; n + 1];
    for (i, row) in id.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate().take(n + 1 - i) {
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            *slot = pool.insert(a + (b - a) * s + (c - a) * t);
        }
    }
    for i in 0..n {
        for j in 0..n - i {
            tris.push([id[i][j], id[i + 1][j], id[i][j + 1]]);
            if i + j + 1 < n {
                tris.push([id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]]);
            }
        }
    }
}

fn structured_triangle(poly: &Polygon, target_h: f64) -> Result<Mesh> {
    let v = poly.vertices();
    let obtuse = (0..3).find(|&k| (v[(k + 1) % 3] - v[k]).dot(v[(k + 2) % 3] - v[k]) < 0.0);
    let patches = match obtuse {
        None => vec![[v[0], v[1], v[2]]],
        Some(k) => {
            let (top, p, q) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
            let d = q - p;
            let foot = p + d * ((top - p).dot(d) / d.dot(d));
            vec![[p, foot, top], [foot, q, top]]
        }
    };
    let longest = patches
        .iter()
        .flat_map(|t| [t[0].dist(t[1]), t[1].dist(t[2]), t[2].dist(t[0])])
        .fold(0.0, f64::max);
    let n = (longest / target_h).ceil().max(1.0) as usize;
    let mut pool = VertexPool::new(1e-9 * poly.diameter() / n as f64);
    let mut tris = Vec::new();
    for t in &patches {
        subdivide_triangle(&mut pool, &mut tris, t[0], t[1], t[2], n);
    }
    Mesh::from_triangles(pool.points, tris)
}

const NONE: usize = usize::MAX;

/// Triangles with neighbor links; `n[i]` lies across the edge opposite `v[i]`.
struct Tri {
    v: [usize; 3],
    n: [usize; 3],
}

struct Triangulation {
    pts: Vec<Point>,
    tris: Vec<Tri>,
}

fn incircle(a: Point, b: Point, c: Point, d: Point) -> (f64, f64) {
    let (ad, bd, cd) = (a - d, b - d, c - d);
    let (la, lb, lc) = (ad.dot(ad), bd.dot(bd), cd.dot(cd));
    let det = la * bd.cross(cd) + lb * cd.cross(ad) + lc * ad.cross(bd);
    let mag = la * bd.cross(cd).abs() + lb * cd.cross(ad).abs() + lc * ad.cross(bd).abs();
    (det, mag)
}

impl Triangulation {
    fn replace_neighbor(&mut self, t: usize, old: usize, new: usize) {
        if t == NONE {
            return;
        }
        for slot in &mut self.tris[t].n {
            if *slot == old {
                *slot = new;
                return;
            }
        }
    }

    /// Edge opposite local vertex `i` of `t` violates the empty-circle test.
    fn illegal(&self, t: usize, i: usize) -> bool {
        let u = self.tris[t].n[i];
        if u == NONE {
            return false;
        }
        let [a, b, c] = self.tris[t].v;
        let j = self.tris[u].n.iter().position(|&x| x == t).expect("mutual neighbors");
        let d = self.tris[u].v[j];
        let (det, mag) = incircle(self.pts[a], self.pts[b], self.pts[c], self.pts[d]);
        det > 1e-12 * mag
    }

    /// Flips the edge opposite local vertex `i` of `t`; returns the two new
    /// triangles, each with that vertex at local index 0.
    fn flip(&mut self, t: usize, i: usize) -> (usize, usize) {
        let u = self.tris[t].n[i];
        let q = self.tris[t].v[i];
        let (b, c) = (self.tris[t].v[(i + 1) % 3], self.tris[t].v[(i + 2) % 3]);
        let (n1, n2) = (self.tris[t].n[(i + 1) % 3], self.tris[t].n[(i + 2) % 3]);
        let j = self.tris[u].n.iter().position(|&x| x == t).expect("mutual neighbors");
        let d = self.tris[u].v[j];
        // u is (d, c, b) from local index j.
        let (m2, m1) = (self.tris[u].n[(j + 2) % 3], self.tris[u].n[(j + 1) % 3]);
        self.tris[t] = Tri { v: [q, b, d], n: [m1, u, n2] };
        self.tris[u] = Tri { v: [q, d, c], n: [m2, n1, t] };
        self.replace_neighbor(m1, u, t);
        self.replace_neighbor(n1, t, u);
        (t, u)
    }

    fn legalize(&mut self, mut stack: Vec<(usize, usize)>) {
        while let Some((t, i)) = stack.pop() {
            if self.illegal(t, i) {
                let (t, u) = self.flip(t, i);
                stack.extend([(t, 0), (t, 2), (u, 0), (u, 1)]);
            }
        }
    }

    fn locate(&self, p: Point, start: usize) -> Option<usize> {
        let mut t = start;
        for _ in 0..4 * self.tris.len() + 16 {
            let tri = &self.tris[t];
            let step = (0..3).find(|&i| {
                let (a, b) = (self.pts[tri.v[(i + 1) % 3]], self.pts[tri.v[(i + 2) % 3]]);
                orient(a, b, p) < 0.0 && tri.n[i] != NONE
            });
            match step {
                Some(i) => t = tri.n[i],
                None => return Some(t),
            }
        }
        None
    }

    fn insert(&mut self, p: Point, start: usize, tol: f64) -> Result<usize> {
        let t = self
            .locate(p, start)
            .or_else(|| {
                (0..self.tris.len()).find(|&t| {
                    let v = self.tris[t].v;
                    (0..3).all(|i| orient(self.pts[v[(i + 1) % 3]], self.pts[v[(i + 2) % 3]], p) >= -tol)
                })
            })
            .ok_or_else(|| Error::Geometry("mesher failed to locate a lattice point".into()))?;
        let q = self.pts.len();
        self.pts.push(p);
        let v = self.tris[t].v;
        let on_edge = (0..3).find(|&i| {
            let (a, b) = (self.pts[v[(i + 1) % 3]], self.pts[v[(i + 2) % 3]]);
            orient(a, b, p).abs() <= tol * a.dist(b)
        });
        let stack = match on_edge {
            None => self.split_face(t, q),
            Some(i) => self.split_edge(t, i, q)?,
        };
        self.legalize(stack);
        Ok(t)
    }

    fn split_face(&mut self, t: usize, q: usize) -> Vec<(usize, usize)> {
        let Tri { v: [a, b, c], n: [na, nb, nc] } = self.tris[t];
        let (t1, t2) = (self.tris.len(), self.tris.len() + 1);
        self.tris[t] = Tri { v: [a, b, q], n: [t1, t2, nc] };
        self.tris.push(Tri { v: [b, c, q], n: [t2, t, na] });
        self.tris.push(Tri { v: [c, a, q], n: [t, t1, nb] });
        self.replace_neighbor(na, t, t1);
        self.replace_neighbor(nb, t, t2);
        vec![(t, 2), (t1, 2), (t2, 2)]
    }

    fn split_edge(&mut self, t: usize, i: usize, q: usize) -> Result<Vec<(usize, usize)>> {
        let u = self.tris[t].n[i];
        if u == NONE {
            return Err(Error::Geometry("lattice point on the domain boundary".into()));
        }
        let a = self.tris[t].v[i];
        let (b, c) = (self.tris[t].v[(i + 1) % 3], self.tris[t].v[(i + 2) % 3]);
        let (ntb, ntc) = (self.tris[t].n[(i + 1) % 3], self.tris[t].n[(i + 2) % 3]);
        let j = self.tris[u].n.iter().position(|&x| x == t).expect("mutual neighbors");
        let d = self.tris[u].v[j];
        let (nuc, nub) = (self.tris[u].n[(j + 1) % 3], self.tris[u].n[(j + 2) % 3]);
        let (t2, u2) = (self.tris.len(), self.tris.len() + 1);
        self.tris[t] = Tri { v: [a, b, q], n: [u2, t2, ntc] };
        self.tris.push(Tri { v: [a, q, c], n: [u, ntb, t] });
        self.tris[u] = Tri { v: [d, c, q], n: [t2, u2, nub] };
        self.tris.push(Tri { v: [d, q, b], n: [t, nuc, u] });
        self.replace_neighbor(ntb, t, t2);
        self.replace_neighbor(nuc, u, u2);
        Ok(vec![(t, 2), (t2, 1), (u, 2), (u2, 1)])
    }
}

fn boundary_points(poly: &Polygon, s: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = poly.edge(i);
        let m = (a.dist(b) / s).ceil().max(1.0) as usize;
        out.extend((0..m).map(|k| a + (b - a) * (k as f64 / m as f64)));
    }
    out
}

/// Delaunay mesh at spacing `s`: boundary points every ≤ s, the centroid,
/// and triangular-lattice points (origin at the centroid) at least 0.55·s
/// from every side.
fn delaunay_mesh(poly: &Polygon, s: f64) -> Result<Mesh> {
    let bnd = boundary_points(poly, s);
    let nb = bnd.len();
    let centroid = poly.centroid();
    let mut tri = Triangulation { pts: bnd, tris: Vec::with_capacity(2 * nb) };
    tri.pts.push(centroid);
    for i in 0..nb {
        let prev = (i + nb - 1) % nb;
        let next = (i + 1) % nb;
        tri.tris.push(Tri { v: [nb, i, (i + 1) % nb], n: [NONE, next, prev] });
    }
    let all: Vec<(usize, usize)> = (0..nb).map(|t| (t, 1)).chain((0..nb).map(|t| (t, 2))).collect();
    tri.legalize(all);

    let row = s * 3f64.sqrt() / 2.0;
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in poly.vertices() {
        (xmin, xmax, ymin, ymax) = (xmin.min(p.x), xmax.max(p.x), ymin.min(p.y), ymax.max(p.y));
    }
    let jlo = ((ymin - centroid.y) / row).floor() as i64;
    let jhi = ((ymax - centroid.y) / row).ceil() as i64;
    let ilo = ((xmin - centroid.x) / s).floor() as i64 - 1;
    let ihi = ((xmax - centroid.x) / s).ceil() as i64 + 1;
    let tol = 1e-12 * s;
    let mut start = 0;
    for j in jlo..=jhi {
        let shift = if j.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        for i in ilo..=ihi {
            if i == 0 && j == 0 {
                continue;
            }
            let p = Point::new(centroid.x + (i as f64 + shift) * s, centroid.y + j as f64 * row);
            if poly.margin(p) >= 0.55 * s && p.dist(centroid) >= 0.55 * s {
                start = tri.insert(p, start, tol)?;
            }
        }
    }
    let triangles = tri.tris.iter().map(|t| t.v).collect();
    Mesh::from_triangles(tri.pts, triangles)
}

fn delaunay(poly: &Polygon, target_h: f64) -> Result<Mesh> {
    let mut s = target_h / 1.3;
    let mut mesh = delaunay_mesh(poly, s)?;
    for _ in 0..6 {
        if mesh.h <= target_h {
            break;
        }
        s *= 0.92;
        mesh = delaunay_mesh(poly, s)?;
    }
    Ok(mesh)
}
