use std::sync::Arc;

use rayon::prelude::*;

use super::field::FemField;
use super::space::FemSpace;
use crate::linalg::{Cholesky, CsrMatrix, Triplet};
use crate::mesher::{BoundaryTag, TaggedMesh};
use crate::{Error, Point, Result};

/// Relative residual the direct solve must reach.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// Stiffness matrix and load vector before constraint elimination.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub space: Arc<FemSpace>,
    pub matrix: CsrMatrix,
    pub load: Vec<f64>,
    /// Constrained nodes (`Γ0`), ascending.
    pub dirichlet: Vec<usize>,
    /// Prescribed values, indexed by node.
    pub dirichlet_values: Vec<f64>,
}

/// Diagnostics of a solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveInfo {
    pub unknowns: usize,
    pub residual: f64,
    pub refinement_steps: usize,
}

fn element_matrices<F>(space: &FemSpace, weight: &F, mass: bool) -> Vec<Vec<f64>>
where
    F: Fn(Point) -> f64 + Sync,
{
    let nd = space.local_dofs();
    (0..space.num_elements())
        .into_par_iter()
        .map(|t| {
            let mut local = vec![0.0; nd * nd];
            for q in space.quadrature(t, None) {
                let (v, g, _) = space.shape(t, q.bary);
                let w = q.weight * weight(q.x);
                for i in 0..nd {
                    for j in 0..nd {
                        local[i * nd + j] += w * if mass { v[i] * v[j] } else { g[i].dot(&g[j]) };
                    }
                }
            }
            local
        })
        .collect()
}

fn scatter(space: &FemSpace, locals: &[Vec<f64>]) -> CsrMatrix {
    let nd = space.local_dofs();
    let mut triplets: Vec<Triplet> = Vec::with_capacity(locals.len() * nd * nd);
    for (t, local) in locals.iter().enumerate() {
        let dofs = space.dofs(t);
        for i in 0..nd {
            for j in 0..nd {
                triplets.push((dofs[i], dofs[j], local[i * nd + j]));
            }
        }
    }
    CsrMatrix::from_triplets(space.num_nodes(), &triplets)
}

/// `∫ w ∇φ_i·∇φ_j`.
pub fn weighted_stiffness(space: &FemSpace, weight: impl Fn(Point) -> f64 + Sync) -> CsrMatrix {
    scatter(space, &element_matrices(space, &weight, false))
}

/// `∫ φ_i φ_j`.
pub fn mass_matrix(space: &FemSpace) -> CsrMatrix {
    scatter(space, &element_matrices(space, &|_| 1.0, true))
}

/// Load `-∫ f φ_i` for `Δu = f`.
fn load_vector(space: &FemSpace, source: &(impl Fn(Point) -> f64 + Sync)) -> Vec<f64> {
    let locals: Vec<Vec<f64>> = (0..space.num_elements())
        .into_par_iter()
        .map(|t| {
            let mut local = vec![0.0; space.local_dofs()];
            for q in space.quadrature(t, None) {
                let (v, _, _) = space.shape(t, q.bary);
                let f = source(q.x);
                for (l, b) in local.iter_mut().zip(v) {
                    *l -= q.weight * f * b;
                }
            }
            local
        })
        .collect();
    let mut load = vec![0.0; space.num_nodes()];
    for (t, local) in locals.iter().enumerate() {
        for (&n, v) in space.dofs(t).iter().zip(local) {
            load[n] += v;
        }
    }
    load
}

/// Poisson problem `Δu = source` with `u = dirichlet` on `Γ0` and zero
/// flux on `Γ1`.
pub fn assemble_poisson(
    space: Arc<FemSpace>,
    source: impl Fn(Point) -> f64 + Sync,
    dirichlet: impl Fn(Point) -> f64,
) -> Result<LinearSystem> {
    if !space.mesh.has_tag(BoundaryTag::Gamma0) {
        return Err(Error::NoDirichletBoundary);
    }
    let matrix = weighted_stiffness(&space, |_| 1.0);
    let load = load_vector(&space, &source);
    let dirichlet_nodes: Vec<usize> = (0..space.num_nodes()).filter(|&i| space.on_gamma0[i]).collect();
    let mut dirichlet_values = vec![0.0; space.num_nodes()];
    for &i in &dirichlet_nodes {
        dirichlet_values[i] = dirichlet(space.nodes[i]);
    }
    Ok(LinearSystem { space, matrix, load, dirichlet: dirichlet_nodes, dirichlet_values })
}

/// Torsion problem `Δu = N`, `u = 0` on `Γ0`, `u_ν = 0` on `Γ1`.
pub fn assemble(mesh: Arc<TaggedMesh>, degree: usize, n_dim: usize) -> Result<LinearSystem> {
    assemble_with(mesh, degree, n_dim, true)
}

/// As [`assemble`], choosing whether `Γ0` edges are curved (degree 2).
pub fn assemble_with(mesh: Arc<TaggedMesh>, degree: usize, n_dim: usize, curved: bool) -> Result<LinearSystem> {
    if n_dim != 2 {
        return Err(Error::InvalidArgument(format!("planar solves need N = 2, got {n_dim}")));
    }
    let space = Arc::new(FemSpace::new(mesh, degree, curved)?);
    let n = n_dim as f64;
    assemble_poisson(space, move |_| n, |_| 0.0)
}

impl LinearSystem {
    pub fn free_nodes(&self) -> Vec<usize> {
        let mut fixed = vec![false; self.space.num_nodes()];
        for &i in &self.dirichlet {
            fixed[i] = true;
        }
        (0..fixed.len()).filter(|&i| !fixed[i]).collect()
    }

    /// Eliminates the constraints and returns `(A_ff, b_f - A_fd g_d)`.
    pub fn reduced(&self) -> (CsrMatrix, Vec<f64>, Vec<usize>) {
        let free = self.free_nodes();
        let a = self.matrix.principal_submatrix(&free);
        let rhs = free
            .iter()
            .map(|&i| {
                let lift: f64 = self.matrix.row(i).map(|(j, v)| v * if self.space.on_gamma0[j] { self.dirichlet_values[j] } else { 0.0 }).sum();
                self.load[i] - lift
            })
            .collect();
        (a, rhs, free)
    }
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb == 0.0 { r } else { r / nb }
}

/// Direct sparse solve with up to two steps of iterative refinement.
pub fn solve(system: &LinearSystem) -> Result<FemField> {
    solve_with_info(system).map(|(f, _)| f)
}

pub fn solve_with_info(system: &LinearSystem) -> Result<(FemField, SolveInfo)> {
    let (a, b, free) = system.reduced();
    let mut values = system.dirichlet_values.clone();
    if free.is_empty() {
        let info = SolveInfo { unknowns: 0, residual: 0.0, refinement_steps: 0 };
        return Ok((FemField::new(system.space.clone(), values)?, info));
    }
    let chol = Cholesky::new(&a)?;
    let mut x = chol.solve(&b);
    let mut residual = relative_residual(&a, &x, &b);
    let mut steps = 0;
    while residual > SOLVE_TOLERANCE * 1e-2 && steps < 2 {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let dx = chol.solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        residual = relative_residual(&a, &x, &b);
        steps += 1;
    }
    if !(residual <= SOLVE_TOLERANCE) {
        return Err(Error::Solver { reason: "direct solve missed the residual target".into(), residual });
    }
    log::info!("solve: {} unknowns, relative residual {residual:.3e}, {steps} refinement steps", free.len());
    for (k, &i) in free.iter().enumerate() {
        values[i] = x[k];
    }
    let info = SolveInfo { unknowns: free.len(), residual, refinement_steps: steps };
    Ok((FemField::new(system.space.clone(), values)?, info))
}

/// Mesh, assemble and solve the torsion problem in one call.
pub fn solve_torsion(mesh: Arc<TaggedMesh>, degree: usize) -> Result<FemField> {
    solve(&assemble(mesh, degree, 2)?)
}
