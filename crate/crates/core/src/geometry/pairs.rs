use std::f64::consts::PI;

use serde::Serialize;

use super::{orient, Point, Polygon, XorShift64Star};
use crate::{Error, Result};

pub const MIN_PAIR_AREA: f64 = 1e-4;
const MAX_ATTEMPTS: usize = 100;

/// Andrew's monotone chain; collinear points are dropped. Counterclockwise,
/// starting from the lexicographically smallest point.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionPair {
    pub inner: Polygon,
    pub outer: Polygon,
    /// Resampling attempts consumed (1 when the first draw was usable).
    pub attempts: usize,
}

fn disk_point(rng: &mut XorShift64Star) -> Point {
    let r = rng.next_f64().sqrt();
    let phi = 2.0 * PI * rng.next_f64();
    Point::new(r * phi.cos(), r * phi.sin())
}

fn usable(hull: Vec<Point>) -> Option<Polygon> {
    if hull.len() < 3 {
        return None;
    }
    let poly = Polygon::new(hull).ok()?;
    (poly.area() > MIN_PAIR_AREA).then_some(poly)
}

/// Random nested convex pair: the outer polygon is the hull of `n_outer`
/// uniform points in the unit disk, the inner one the hull of `n_inner`
/// uniform points of the outer polygon (rejection from the disk).
pub fn inclusion_pair(seed: u64, n_outer: usize, n_inner: usize) -> Result<InclusionPair> {
    if n_outer < 3 || n_inner < 3 {
        return Err(Error::Geometry("inclusion pair needs >= 3 points per polygon".into()));
    }
    let mut rng = XorShift64Star::new(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let Some(outer) = random_outer(&mut rng, n_outer) else { continue };
        let mut inner_pts = Vec::with_capacity(n_inner);
        while inner_pts.len() < n_inner {
            let p = disk_point(&mut rng);
            if outer.contains(p) {
                inner_pts.push(p);
            }
        }
        let Some(inner) = usable(convex_hull(&inner_pts)) else { continue };
        if inner.vertices().iter().all(|&v| outer.contains(v)) {
            return Ok(InclusionPair { inner, outer, attempts: attempt });
        }
    }
    Err(Error::Geometry(format!("no nondegenerate pair after {MAX_ATTEMPTS} attempts (seed {seed})")))
}

fn random_outer(rng: &mut XorShift64Star, n_outer: usize) -> Option<Polygon> {
    let pts: Vec<Point> = (0..n_outer).map(|_| disk_point(rng)).collect();
    usable(convex_hull(&pts))
}

/// Point at arc-length fraction `t` ∈ [0, 1) of the boundary.
fn boundary_point(poly: &Polygon, t: f64) -> Point {
    let lens: Vec<f64> = (0..poly.len()).map(|i| {
        let (a, b) = poly.edge(i);
        a.dist(b)
    }).collect();
    let mut s = t * lens.iter().sum::<f64>();
    for (i, &l) in lens.iter().enumerate() {
        if s <= l || i + 1 == lens.len() {
            let (a, b) = poly.edge(i);
            return a + (b - a) * (s / l).min(1.0);
        }
        s -= l;
    }
    unreachable!("polygon has edges")
}

/// Random nested pair with a thin inner strip: the outer polygon as in
/// [`inclusion_pair`], the inner one a rectangle around a chord between two
/// uniform boundary points, shortened by 2% at each end, with width
/// log-uniform in [0.01, 0.3] times the chord length. The width is halved
/// until the strip fits, and the draw is rejected once it would fall below
/// 0.01 of the chord (such slivers defeat the eigensolver).
/// These are the shapes for which μ₁ can drop below that of the outer domain.
pub fn strip_pair(seed: u64, n_outer: usize) -> Result<InclusionPair> {
    if n_outer < 3 {
        return Err(Error::Geometry("inclusion pair needs >= 3 points per polygon".into()));
    }
    let mut rng = XorShift64Star::new(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let Some(outer) = random_outer(&mut rng, n_outer) else { continue };
        let p = boundary_point(&outer, rng.next_f64());
        let q = boundary_point(&outer, rng.next_f64());
        let len = p.dist(q);
        let mut width = len * 0.01 * 30f64.powf(rng.next_f64());
        if len < 1e-3 {
            continue;
        }
        let (a, b) = (p + (q - p) * 0.02, q + (p - q) * 0.02);
        let u = (q - p) * (1.0 / len);
        let normal = Point::new(-u.y, u.x);
        while width >= 0.01 * len {
            let off = normal * (0.5 * width);
            let rect = vec![a - off, b - off, b + off, a + off];
            if rect.iter().all(|&v| outer.margin(v) > 0.0) {
                if let Some(inner) = usable(convex_hull(&rect)) {
                    return Ok(InclusionPair { inner, outer, attempts: attempt });
                }
                break;
            }
            width *= 0.5;
        }
    }
    Err(Error::Geometry(format!("no nondegenerate strip pair after {MAX_ATTEMPTS} attempts (seed {seed})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_and_collinear_points() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.3, 0.6),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]);
    }

    #[test]
    fn pair_is_deterministic_and_nested() {
        let a = inclusion_pair(1, 12, 6).unwrap();
        let b = inclusion_pair(1, 12, 6).unwrap();
        assert_eq!(a.inner, b.inner);
        assert_eq!(a.outer, b.outer);
        let (ai, ao) = (a.inner.area(), a.outer.area());
        assert!(0.0 < ai && ai < ao && ao < PI);
        for &v in a.inner.vertices() {
            assert!(a.outer.margin(v) >= 0.0);
        }
        assert!(inclusion_pair(1, 2, 6).is_err());
    }

    #[test]
    fn strip_pair_is_thin_and_nested() {
        for seed in 0..20 {
            let pair = strip_pair(seed, 12).unwrap();
            assert_eq!(pair.inner.len(), 4);
            let w = pair.inner.edge(1).0.dist(pair.inner.edge(1).1);
            let l = pair.inner.edge(0).0.dist(pair.inner.edge(0).1);
            assert!(w.min(l) <= 0.3 * w.max(l) + 1e-12);
            for &v in pair.inner.vertices() {
                assert!(pair.outer.margin(v) > 0.0);
            }
        }
    }
}
