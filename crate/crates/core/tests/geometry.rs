use std::f64::consts::PI;

use proptest::prelude::*;
use speclab::geometry::*;

fn brute_diameter(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for a in pts {
        for b in pts {
            d = d.max(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
        }
    }
    d
}

#[test]
fn regular_polygon_diameter_against_brute_force() {
    let p = build(&DomainSpec::RegularPolygon { n_vertices: 64, circumradius: 1.0 }).unwrap();
    let d = p.diameter();
    assert_eq!(d, brute_diameter(p.vertices()));
    assert!(d <= 2.0 && d >= 2.0 * (PI / 64.0).cos());
}

#[test]
fn seeded_pair_golden_values() {
    let pair = inclusion_pair(1, 12, 6).unwrap();
    // Frozen from the first run.
    assert_eq!(pair.inner.len(), 5);
    assert_eq!(pair.outer.len(), 6);
    assert!((pair.inner.area() - 0.34128743449730037).abs() < 1e-14);
    assert!((pair.outer.area() - 1.4026291162760884).abs() < 1e-14);
    let (ai, ao) = (pair.inner.area(), pair.outer.area());
    assert!(0.0 < ai && ai < ao && ao < PI);
    // Half-plane oracle written out independently of the library.
    let o = pair.outer.vertices();
    for v in pair.inner.vertices() {
        for i in 0..o.len() {
            let (a, b) = (o[i], o[(i + 1) % o.len()]);
            assert!((b.x - a.x) * (v.y - a.y) - (b.y - a.y) * (v.x - a.x) >= 0.0);
        }
    }
}

fn in_true_domain(spec: &DomainSpec, p: Point, tol: f64) -> bool {
    match *spec {
        DomainSpec::Sector { radius, opening, .. } => {
            p.norm() <= radius + tol && (p.norm() <= tol || p.y.atan2(p.x).abs() <= 0.5 * opening + tol)
        }
        DomainSpec::ReuleauxTriangle { width: w, .. } => {
            let centers = [Point::new(-0.5 * w, 0.0), Point::new(0.5 * w, 0.0), Point::new(0.0, 0.5 * w * 3f64.sqrt())];
            centers.iter().all(|c| p.dist(*c) <= w + tol)
        }
        _ => unreachable!(),
    }
}

#[test]
fn curved_domains_are_inscribed() {
    for spec in [
        DomainSpec::Sector { radius: 1.0, opening: 1.654, n_arc: 48 },
        DomainSpec::Sector { radius: 2.0, opening: 3.0, n_arc: 40 },
        DomainSpec::ReuleauxTriangle { width: 2.0, n_arc: 32 },
    ] {
        let m = triangulate(&spec, 0.08, &DirichletSelector::None).unwrap();
        let r = m.refine();
        for p in m.vertices.iter().chain(&r.vertices) {
            assert!(in_true_domain(&spec, *p, 1e-12), "{spec}: {p:?}");
        }
    }
}

#[test]
fn mesh_text_round_trip_preserves_markers() {
    let spec = DomainSpec::HalfRhombus { diameter: 2.0, theta: 0.3, base_marker: Marker::Dirichlet };
    let m = triangulate(&spec, 0.2, &DirichletSelector::None).unwrap();
    let back = Mesh::from_text(&m.to_text()).unwrap();
    assert_eq!(back, m);
    assert!(back.dirichlet_edge_count() > 0);
}

#[test]
fn selector_on_segment() {
    let sel = DirichletSelector::OnSegment { a: Point::new(0.0, 0.0), b: Point::new(1.0, 0.0) };
    let m = triangulate(&DomainSpec::Square { side: 1.0 }, 0.1, &sel).unwrap();
    let n = (1.0 / (0.1 / 2f64.sqrt())).ceil() as usize;
    assert_eq!(m.dirichlet_edge_count(), n);
    let all = triangulate(&DomainSpec::Square { side: 1.0 }, 0.1, &DirichletSelector::All).unwrap();
    assert_eq!(all.dirichlet_edge_count(), all.boundary.len());
}

fn polygon_strategy() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6..20).prop_filter_map("degenerate hull", |raw| {
        let pts: Vec<Point> = raw.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        let hull = convex_hull(&pts);
        (hull.len() >= 3 && area(&hull) > 0.05).then_some(hull)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rigid_motion_invariance(hull in polygon_strategy(), angle in 0.0f64..(2.0 * PI), dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let moved: Vec<Point> = hull.iter().map(|p| p.rotated(angle) + Point::new(dx, dy)).collect();
        let a = build(&DomainSpec::ConvexHullPolygon { vertices: hull }).unwrap();
        let b = build(&DomainSpec::ConvexHullPolygon { vertices: moved }).unwrap();
        prop_assert!((a.diameter() - b.diameter()).abs() <= 1e-12);
        prop_assert!((a.area() - b.area()).abs() <= 1e-12);
    }

    #[test]
    fn refinement_halves_h(hull in polygon_strategy(), h in 0.15f64..0.6) {
        let spec = DomainSpec::ConvexHullPolygon { vertices: hull };
        let m = triangulate(&spec, h, &DirichletSelector::None).unwrap();
        prop_assert!(m.h <= h);
        let r = m.refine();
        r.validate().unwrap();
        prop_assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        prop_assert_eq!(r.boundary.len(), 2 * m.boundary.len());
        prop_assert!((r.h - m.h / 2.0).abs() <= 1e-12 * m.h);
        prop_assert!((r.area() - m.area()).abs() <= 1e-12);
        let poly = build(&spec).unwrap();
        prop_assert!((m.area() - poly.area()).abs() <= 1e-12);
    }

    #[test]
    fn inclusion_pairs_are_nested(seed in any::<u64>(), n_outer in 3usize..30, n_inner in 3usize..12) {
        let pair = inclusion_pair(seed, n_outer, n_inner).unwrap();
        prop_assert!(pair.inner.diameter() <= pair.outer.diameter());
        prop_assert!(pair.inner.area() < pair.outer.area());
        prop_assert!(pair.inner.area() > MIN_PAIR_AREA);
        for &v in pair.inner.vertices() {
            prop_assert!(pair.outer.margin(v) >= 0.0);
        }
        let again = inclusion_pair(seed, n_outer, n_inner).unwrap();
        prop_assert_eq!(again.inner, pair.inner);
    }
}
