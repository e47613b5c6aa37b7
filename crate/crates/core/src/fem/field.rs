use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::Matrix2;
use rayon::prelude::*;

use super::space::{basis, basis_hessians, FemSpace};
use crate::numeric::pairwise_sum;
use crate::{Error, Point, Result};

/// Finite-element scalar field: a coefficient per node of its space.
#[derive(Debug, Clone)]
pub struct FemField {
    pub space: Arc<FemSpace>,
    pub values: Vec<f64>,
}

impl FemField {
    pub fn new(space: Arc<FemSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.num_nodes() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a space with {} nodes",
                values.len(),
                space.num_nodes()
            )));
        }
        Ok(Self { space, values })
    }

    /// Nodal interpolant of `f` (exact for quadratics on straight P2 elements).
    pub fn interpolate(space: Arc<FemSpace>, f: impl Fn(Point) -> f64) -> Self {
        let values = space.nodes.iter().map(|&p| f(p)).collect();
        Self { space, values }
    }

    pub fn degree(&self) -> usize {
        self.space.degree
    }

    fn local(&self, t: usize) -> impl Iterator<Item = f64> + '_ {
        self.space.dofs(t).iter().map(|&n| self.values[n])
    }

    pub fn value_at(&self, t: usize, l: [f64; 3]) -> f64 {
        let (v, _) = basis(self.degree(), l);
        self.local(t).zip(v).map(|(c, b)| c * b).sum()
    }

    /// Exact gradient of the element polynomial at a barycentric point.
    pub fn gradient_at(&self, t: usize, l: [f64; 3]) -> Point {
        let (_, grads, _) = self.space.shape(t, l);
        self.local(t).zip(grads).fold(Point::zeros(), |acc, (c, g)| acc + g * c)
    }

    /// Hessian at a barycentric point; on straight elements it is constant.
    pub fn hessian_at(&self, t: usize, l: [f64; 3]) -> Result<Matrix2<f64>> {
        if self.degree() != 2 {
            return Err(Error::Degree { required: 2, actual: self.degree() });
        }
        let (_, ref_grads) = basis(2, l);
        let hs = basis_hessians();
        let mut g_ref = Point::zeros();
        let mut h_ref = Matrix2::zeros();
        for (k, c) in self.local(t).enumerate() {
            g_ref += Point::new(ref_grads[k][0], ref_grads[k][1]) * c;
            h_ref += hs[k] * c;
        }
        let j = self.space.jacobian(t, l);
        let jinv = j.try_inverse().ok_or_else(|| Error::InvalidMesh(format!("element {t} is degenerate")))?;
        let g = jinv.transpose() * g_ref;
        let [hx, hy] = self.space.geometry_hessians(t);
        let h = jinv.transpose() * (h_ref - hx * g.x - hy * g.y) * jinv;
        Ok((h + h.transpose()) * 0.5)
    }

    /// Element Hessian, evaluated at the centroid on curved elements.
    pub fn hessian_on(&self, t: usize) -> Result<Matrix2<f64>> {
        self.hessian_at(t, [1.0 / 3.0; 3])
    }

    /// Value at an arbitrary point, `None` outside the discrete domain.
    pub fn evaluate(&self, p: Point) -> Option<f64> {
        self.space.locate(p).map(|(t, l)| self.value_at(t, l))
    }

    /// `∫ f(x, u, ∇u)` by element quadrature with deterministic summation.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(Point, f64, Point) -> f64 + Sync,
    {
        let parts: Vec<f64> = (0..self.space.num_elements())
            .into_par_iter()
            .map(|t| {
                self.space
                    .quadrature(t, None)
                    .iter()
                    .map(|q| q.weight * f(q.x, self.value_at(t, q.bary), self.gradient_at(t, q.bary)))
                    .sum()
            })
            .collect();
        pairwise_sum(&parts)
    }

    /// `∫ |∇u|²`.
    pub fn dirichlet_energy(&self) -> f64 {
        self.integrate(|_, _, g| g.norm_squared())
    }

    /// Torsion energy `½∫|∇u|² + N∫u`, minimized by the solution.
    pub fn torsion_energy(&self, n_dim: f64) -> f64 {
        self.integrate(|_, u, g| 0.5 * g.norm_squared() + n_dim * u)
    }

    pub fn l2_error(&self, exact: impl Fn(Point) -> f64 + Sync) -> f64 {
        self.integrate(|x, u, _| (u - exact(x)).powi(2)).sqrt()
    }

    /// `‖∇(u − exact)‖_{L²}`.
    pub fn h1_seminorm_error(&self, exact_grad: impl Fn(Point) -> Point + Sync) -> f64 {
        self.integrate(|x, _, g| (g - exact_grad(x)).norm_squared()).sqrt()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Plain-text nodal values: vertex rows match the mesh export indices;
    /// edge nodes (degree 2) follow.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "NODES {} DEGREE {}", self.values.len(), self.degree()).unwrap();
        for (i, (p, v)) in self.space.nodes.iter().zip(&self.values).enumerate() {
            writeln!(out, "{i} {:.17e} {:.17e} {:.17e}", p.x, p.y, v).unwrap();
        }
        out
    }
}
