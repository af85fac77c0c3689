//! P1 finite elements for the Laplace eigenproblem with Neumann, Dirichlet
//! or mixed conditions, and Richardson extrapolation over nested meshes.

mod assemble;
mod eigen;
mod sparse;

use serde::Serialize;

use crate::geometry::{build, triangulate, DirichletSelector, DomainSpec, Marker, Mesh};
use crate::{Error, Result};

pub use assemble::{assemble, element_mass, element_stiffness};
pub use eigen::{solve_smallest, EigResult, DEFAULT_TOL, ITERATION_CAP, MAX_EIGS};
pub use sparse::{nested_dissection, Cholesky, SparseSymmetric};

/// Coarsest mesh size, as a fraction of the diameter.
pub const COARSE_H_FRACTION: f64 = 0.25;

/// Assembles and solves on a mesh; Dirichlet-marked vertices are eliminated.
pub fn solve_mesh(mesh: &Mesh, n_eigs: usize, tol: f64) -> Result<EigResult> {
    let (k, m) = assemble(mesh)?;
    let constrained = mesh.dirichlet_vertices();
    let mut r = solve_smallest(&k, &m, &constrained, n_eigs, tol)?;
    r.h = Some(mesh.h);
    let nd = mesh.dirichlet_edge_count();
    r.bc_summary = match nd {
        0 => "neumann".into(),
        _ if nd == mesh.boundary.len() => "dirichlet".into(),
        _ => format!("mixed ({nd} of {} boundary edges dirichlet)", mesh.boundary.len()),
    };
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub h: f64,
    pub dofs: usize,
    pub value: f64,
    pub residual: f64,
}

/// Richardson estimate of one eigenvalue from three nested meshes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub index: usize,
    /// (4·f(h/4) − f(h/2)) / 3, assuming O(h²) error.
    pub value: f64,
    /// |value − finest|.
    pub error_estimate: f64,
    /// log₂ of successive difference ratios; diagnostic only.
    pub fitted_order: Option<f64>,
    /// False when the level values do not decrease under refinement.
    pub monotone: bool,
    pub levels: Vec<Level>,
}

impl Estimate {
    pub fn finest(&self) -> &Level {
        self.levels.last().expect("three levels")
    }
}

/// JSON record for one extrapolated eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct EigRecord {
    pub domain: String,
    pub k: usize,
    pub h: f64,
    pub dofs: usize,
    pub value: f64,
    pub residual: f64,
    pub error_estimate: f64,
}

impl EigRecord {
    pub fn new(domain: &DomainSpec, k: usize, e: &Estimate) -> Self {
        let f = e.finest();
        Self {
            domain: domain.label(),
            k,
            h: f.h,
            dofs: f.dofs,
            value: e.value,
            residual: f.residual,
            error_estimate: e.error_estimate,
        }
    }
}

pub fn richardson(index: usize, levels: Vec<Level>) -> Estimate {
    let [f0, f1, f2] = [levels[0].value, levels[1].value, levels[2].value];
    let value = (4.0 * f2 - f1) / 3.0;
    let ratio = (f0 - f1) / (f1 - f2);
    let fitted_order = (ratio.is_finite() && ratio > 0.0).then(|| ratio.log2());
    // Values agreeing to solver accuracy (the Neumann zero mode) count as monotone.
    let slack = 1e-12 * f0.abs() + DEFAULT_TOL;
    let monotone = f1 <= f0 + slack && f2 <= f1 + slack;
    Estimate { index, value, error_estimate: (value - f2).abs(), fitted_order, monotone, levels }
}

/// Nested meshes with sizes h₀/2^r, h₀/2^(r+1), h₀/2^(r+2), where
/// h₀ = COARSE_H_FRACTION · diameter.
pub fn nested_meshes(spec: &DomainSpec, refinements: usize, selector: &DirichletSelector) -> Result<[Mesh; 3]> {
    let diameter = build(spec)?.diameter();
    // The pad keeps cell counts stable when the ratio is an integer, so
    // dilated domains get combinatorially identical meshes.
    let mut mesh = triangulate(spec, COARSE_H_FRACTION * diameter * (1.0 + 1e-9), selector)?;
    for _ in 0..refinements {
        mesh = mesh.refine();
    }
    let m1 = mesh.refine();
    let m2 = m1.refine();
    Ok([mesh, m1, m2])
}

/// The first `count` eigenvalues of the problem given by `selector` (plus a
/// Dirichlet base for HalfRhombus specs that ask for it), each
/// extrapolated. Without Dirichlet edges, entry 0 is the zero mode μ₀.
pub fn eigen_estimates(
    spec: &DomainSpec,
    count: usize,
    refinements: usize,
    selector: &DirichletSelector,
) -> Result<Vec<Estimate>> {
    let meshes = nested_meshes(spec, refinements, selector)?;
    let mut per_level = Vec::with_capacity(3);
    for mesh in &meshes {
        per_level.push(solve_mesh(mesh, count, DEFAULT_TOL)?);
    }
    Ok((0..count)
        .map(|i| {
            let levels = per_level
                .iter()
                .map(|r| Level {
                    h: r.h.expect("mesh solve sets h"),
                    dofs: r.dof_count,
                    value: r.eigenvalues[i],
                    residual: r.residuals[i],
                })
                .collect();
            richardson(i, levels)
        })
        .collect())
}

fn has_dirichlet(spec: &DomainSpec, selector: &DirichletSelector) -> bool {
    *selector != DirichletSelector::None
        || matches!(spec, DomainSpec::HalfRhombus { base_marker: Marker::Dirichlet, .. })
}

/// k-th eigenvalue. Pure Neumann problems count from μ₀ = 0; once any
/// boundary part is Dirichlet the count starts at k = 1.
pub fn mu_k(spec: &DomainSpec, k: usize, refinements: usize, selector: &DirichletSelector) -> Result<Estimate> {
    let (count, idx) = if has_dirichlet(spec, selector) {
        if k == 0 {
            return Err(Error::Range("eigenvalues with Dirichlet parts are counted from k = 1".into()));
        }
        (k, k - 1)
    } else {
        (k + 1, k)
    };
    if count > MAX_EIGS {
        return Err(Error::Range(format!("k = {k} exceeds the {MAX_EIGS}-eigenpair limit")));
    }
    let mut all = eigen_estimates(spec, count, refinements, selector)?;
    Ok(all.swap_remove(idx))
}

/// λ_k with every boundary edge Dirichlet, k ≥ 1.
pub fn dirichlet_lambda_k(spec: &DomainSpec, k: usize, refinements: usize) -> Result<Estimate> {
    mu_k(spec, k, refinements, &DirichletSelector::All)
}
