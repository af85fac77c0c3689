use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{Cholesky, SparseSymmetric};
use crate::geometry::XorShift64Star;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_EIGS: usize = 20;
pub const ITERATION_CAP: usize = 500;
// Below this many free dofs the pencil is solved densely.
const DENSE_MAX: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct EigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// ‖Ku − μMu‖₂ / ‖u‖_M per pair.
    pub residuals: Vec<f64>,
    /// Full-length eigenvectors (zero on constrained dofs), M-orthonormal.
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
    pub h: Option<f64>,
    pub dof_count: usize,
    pub bc_summary: String,
    pub shift: f64,
    pub iterations: usize,
    /// Tolerance actually enforced: the requested one, raised to the
    /// roundoff floor of badly scaled pencils (sliver domains).
    pub tolerance: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn apply(a: &SparseSymmetric, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    a.mul_vec(x, &mut y);
    y
}

fn residual(k: &SparseSymmetric, m: &SparseSymmetric, mu: f64, x: &[f64]) -> f64 {
    let (kx, mx) = (apply(k, x), apply(m, x));
    let r: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - mu * b).powi(2)).sum();
    r.sqrt() / dot(x, &mx).sqrt()
}

/// Smallest `n_eigs` eigenpairs of K u = μ M u with the `constrained` dofs
/// removed. Large problems use shift-invert subspace iteration with the
/// shift σ = 10⁻³·tr K / (tr M · n), which keeps the pure Neumann pencil
/// definite without depending on the mesh size, and a Rayleigh–Ritz step
/// per sweep so that multiple eigenvalues are resolved.
pub fn solve_smallest(
    k: &SparseSymmetric,
    m: &SparseSymmetric,
    constrained: &[usize],
    n_eigs: usize,
    tol: f64,
) -> Result<EigResult> {
    let n_full = k.dimension();
    if m.dimension() != n_full {
        return Err(Error::Domain("K and M dimensions differ".into()));
    }
    if n_eigs == 0 || n_eigs > MAX_EIGS {
        return Err(Error::Range(format!("n_eigs {n_eigs} outside 1..={MAX_EIGS}")));
    }
    let mut is_constrained = vec![false; n_full];
    for &c in constrained {
        if c >= n_full {
            return Err(Error::Domain(format!("constrained dof {c} outside dimension {n_full}")));
        }
        is_constrained[c] = true;
    }
    let keep: Vec<usize> = (0..n_full).filter(|&i| !is_constrained[i]).collect();
    let n = keep.len();
    if n == 0 {
        return Err(Error::Domain("every dof is constrained".into()));
    }
    if n_eigs > n {
        return Err(Error::Range(format!("{n_eigs} eigenpairs requested from {n} free dofs")));
    }
    let (kr, mr) = if keep.len() == n_full { (k.clone(), m.clone()) } else { (k.submatrix(&keep), m.submatrix(&keep)) };
    let shift = 1e-3 * kr.trace() / (mr.trace() * n as f64);
    // ‖K‖‖u‖₂ / ‖u‖_M ≈ (tr K / n) / √(tr M / n) sets the size of roundoff in
    // the residual; thin domains push it past an absolute 1e-9.
    let nf = n as f64;
    let floor = 100.0 * f64::EPSILON * (kr.trace() / nf) / (mr.trace() / nf).sqrt();
    let tol = tol.max(floor);
    let bc_summary = if constrained.is_empty() {
        "neumann".to_string()
    } else {
        format!("{} of {} dofs constrained", n_full - n, n_full)
    };
    let p = (n_eigs + n_eigs.max(6)).min(n);
    let (values, vecs, iterations) =
        if n <= DENSE_MAX || 2 * p >= n { dense(&kr, &mr, n_eigs)? } else { subspace(&kr, &mr, n_eigs, p, shift, tol)? };
    let residuals: Vec<f64> = values.iter().zip(&vecs).map(|(&mu, x)| residual(&kr, &mr, mu, x)).collect();
    if let Some((i, r)) = residuals.iter().enumerate().find(|(_, &r)| !(r <= tol)) {
        return Err(Error::NonConvergence(format!("eigenpair {i} residual {r:e} above {tol:e}")));
    }
    let vectors = vecs
        .into_iter()
        .map(|x| {
            let mut full = vec![0.0; n_full];
            for (v, &i) in x.into_iter().zip(&keep) {
                full[i] = v;
            }
            full
        })
        .collect();
    Ok(EigResult {
        eigenvalues: values,
        residuals,
        vectors,
        h: None,
        dof_count: n,
        bc_summary,
        shift,
        iterations,
        tolerance: tol,
    })
}

fn to_dense(a: &SparseSymmetric) -> DMatrix<f64> {
    let n = a.dimension();
    let mut d = DMatrix::zeros(n, n);
    for (i, j, v) in a.entries() {
        d[(i, j)] = v;
    }
    d
}

/// M = LLᵀ, then the standard problem L⁻¹ K L⁻ᵀ.
fn dense(k: &SparseSymmetric, m: &SparseSymmetric, n_eigs: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let chol = nalgebra::Cholesky::new(to_dense(m)).ok_or(Error::Factorization(0))?;
    let l = chol.l();
    let linv_k = l.solve_lower_triangular(&to_dense(k)).ok_or(Error::Factorization(0))?;
    let c = l.solve_lower_triangular(&linv_k.transpose()).ok_or(Error::Factorization(0))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.transpose();
    let mut values = Vec::with_capacity(n_eigs);
    let mut vectors = Vec::with_capacity(n_eigs);
    for &i in order.iter().take(n_eigs) {
        values.push(eig.eigenvalues[i]);
        let x = lt.solve_upper_triangular(&eig.eigenvectors.column(i).into_owned()).ok_or(Error::Factorization(0))?;
        vectors.push(x.as_slice().to_vec());
    }
    Ok((values, vectors, 1))
}

/// M-orthonormalizes the columns of `y` in place (two Gram–Schmidt passes)
/// and returns M·y. Collapsed columns are replaced by fresh random vectors.
fn m_orthonormalize(m: &SparseSymmetric, y: &mut [Vec<f64>], rng: &mut XorShift64Star) -> Vec<Vec<f64>> {
    let mut my: Vec<Vec<f64>> = Vec::with_capacity(y.len());
    for j in 0..y.len() {
        let mut attempts = 0;
        loop {
            let before = dot(&y[j], &apply(m, &y[j])).sqrt();
            for _ in 0..2 {
                for i in 0..j {
                    let c = dot(&my[i], &y[j]);
                    let (yi, yj) = (y[i].clone(), &mut y[j]);
                    axpy(yj, -c, &yi);
                }
            }
            let myj = apply(m, &y[j]);
            let norm = dot(&y[j], &myj).sqrt();
            if norm > 1e-10 * before && norm.is_finite() {
                y[j].iter_mut().for_each(|v| *v /= norm);
                my.push(myj.into_iter().map(|v| v / norm).collect());
                break;
            }
            attempts += 1;
            assert!(attempts < 10, "cannot complete an M-orthonormal basis");
            y[j] = (0..y[j].len()).map(|_| rng.next_f64() - 0.5).collect();
        }
    }
    my
}

fn subspace(
    k: &SparseSymmetric,
    m: &SparseSymmetric,
    n_eigs: usize,
    p: usize,
    shift: f64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = k.dimension();
    let op = Cholesky::factor(&k.combine(1.0, m, shift)?)?;
    let mut rng = XorShift64Star::new(0x5EED_F00D);
    let mut mx: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.next_f64() - 0.5).collect()).collect();
    let mut worst = f64::INFINITY;
    for iter in 1..=ITERATION_CAP {
        let mut y: Vec<Vec<f64>> = mx.iter().map(|b| op.solve(b)).collect();
        let my = m_orthonormalize(m, &mut y, &mut rng);
        let ky: Vec<Vec<f64>> = y.iter().map(|c| apply(k, c)).collect();
        let h = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let combine = |cols: &[Vec<f64>], idx: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (r, c) in cols.iter().enumerate() {
                axpy(&mut out, eig.eigenvectors[(r, idx)], c);
            }
            out
        };
        let x: Vec<Vec<f64>> = order.iter().map(|&i| combine(&y, i)).collect();
        mx = order.iter().map(|&i| combine(&my, i)).collect();
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        worst = (0..n_eigs)
            .map(|i| {
                let kx = combine(&ky, order[i]);
                let r: f64 = kx.iter().zip(&mx[i]).map(|(a, b)| (a - values[i] * b).powi(2)).sum();
                r.sqrt()
            })
            .fold(0.0, f64::max);
        if worst <= 0.5 * tol {
            return Ok((values[..n_eigs].to_vec(), x[..n_eigs].to_vec(), iter));
        }
    }
    Err(Error::NonConvergence(format!("subspace iteration: residual {worst:e} after {ITERATION_CAP} sweeps")))
}
