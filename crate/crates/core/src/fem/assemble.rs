use rayon::prelude::*;

use super::SparseSymmetric;
use crate::geometry::Mesh;
use crate::{Error, Result};

/// P1 stiffness: K_ij = (e_i · e_j) / (4A), e_i the edge opposite vertex i.
pub fn element_stiffness(p: [crate::geometry::Point; 3]) -> [[f64; 3]; 3] {
    let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
    let e = [p[2] - p[1], p[0] - p[2], p[1] - p[0]];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = e[i].dot(e[j]) / (4.0 * area);
        }
    }
    k
}

/// Consistent P1 mass: A/12 · (1 + δ_ij).
pub fn element_mass(area: f64) -> [[f64; 3]; 3] {
    let (d, o) = (area / 6.0, area / 12.0);
    [[d, o, o], [o, d, o], [o, o, d]]
}

/// Stiffness and mass matrices of the full (unconstrained) P1 space.
/// Element matrices are computed in parallel and summed in a fixed order,
/// so the result is bit-identical for any thread count.
pub fn assemble(mesh: &Mesh) -> Result<(SparseSymmetric, SparseSymmetric)> {
    let h = mesh.max_edge_length();
    let elements: Vec<Result<([[f64; 3]; 3], [[f64; 3]; 3])>> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let area = mesh.triangle_area(t);
            if area <= 1e-14 * h * h {
                return Err(Error::DegenerateTriangle { index: t, area });
            }
            let [a, b, c] = mesh.triangles[t];
            let p = [mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]];
            Ok((element_stiffness(p), element_mass(area)))
        })
        .collect();
    let n = mesh.vertices.len();
    let mut kt = Vec::with_capacity(9 * elements.len());
    let mut mt = Vec::with_capacity(9 * elements.len());
    for (tri, el) in mesh.triangles.iter().zip(elements) {
        let (ke, me) = el?;
        for i in 0..3 {
            for j in 0..3 {
                kt.push((tri[i], tri[j], ke[i][j]));
                mt.push((tri[i], tri[j], me[i][j]));
            }
        }
    }
    Ok((SparseSymmetric::from_triplets(n, kt)?, SparseSymmetric::from_triplets(n, mt)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn reference_element_stiffness() {
        let k = element_stiffness([Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]);
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_triangle_square() {
        let v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        let mesh = Mesh::from_triangles(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        let (k, m) = assemble(&mesh).unwrap();
        for s in k.row_sums() {
            assert!(s.abs() < 1e-14);
        }
        assert!((m.sum() - 1.0).abs() < 1e-15);
        assert_eq!(k.max_asymmetry(), 0.0);
    }
}
