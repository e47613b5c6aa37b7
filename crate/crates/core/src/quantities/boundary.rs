use std::collections::HashSet;

use super::EDGE_POINTS;
use crate::fem::FemField;
use crate::mesher::BoundaryTag;
use crate::numeric::pairwise_sum;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub x: Point,
    pub weight: f64,
    pub normal: Point,
    pub u_nu: f64,
    /// Index into the mesh's boundary edges.
    pub edge: usize,
    pub element: usize,
    pub bary: [f64; 3],
    /// Whether the edge touches a point of `∂Γ0` (one-edge collar).
    pub collar: bool,
}

/// `u_ν` at the Gauss points of every `Γ0` edge.
#[derive(Debug, Clone)]
pub struct BoundaryField {
    pub points: Vec<BoundaryPoint>,
}

impl BoundaryField {
    pub fn total_weight(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// `∫_{Γ0} f` with deterministic summation.
    pub fn integrate(&self, f: impl Fn(&BoundaryPoint) -> f64) -> f64 {
        let v: Vec<f64> = self.points.iter().map(|p| p.weight * f(p)).collect();
        pairwise_sum(&v)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|p| p.u_nu) / self.total_weight()
    }

    /// Minimum of `u_ν` away from the collar edges.
    pub fn min_excluding_collar(&self) -> f64 {
        self.points.iter().filter(|p| !p.collar).map(|p| p.u_nu).fold(f64::INFINITY, f64::min)
    }

    pub fn min(&self) -> f64 {
        self.points.iter().map(|p| p.u_nu).fold(f64::INFINITY, f64::min)
    }

    pub fn collar_edges(&self) -> usize {
        self.points.iter().filter(|p| p.collar).map(|p| p.edge).collect::<HashSet<_>>().len()
    }
}

/// Normal derivative on `Γ0`, with the gradient taken from the element that
/// owns each edge.
pub fn normal_derivative(u: &FemField) -> Result<BoundaryField> {
    if u.degree() != 2 {
        return Err(Error::Degree { required: 2, actual: u.degree() });
    }
    let mesh = &u.space.mesh;
    let corner_vertices: HashSet<usize> = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.tag == BoundaryTag::Gamma1)
        .flat_map(|e| e.v)
        .collect();
    let mut points = Vec::new();
    for (i, e) in mesh.boundary_edges.iter().enumerate() {
        if e.tag != BoundaryTag::Gamma0 {
            continue;
        }
        let collar = e.v.iter().any(|v| corner_vertices.contains(v));
        for q in u.space.edge_quadrature(i, EDGE_POINTS) {
            let g = u.gradient_at(q.element, q.bary);
            points.push(BoundaryPoint { x: q.x, weight: q.weight, normal: q.normal, u_nu: g.dot(&q.normal), edge: i, element: q.element, bary: q.bary, collar });
        }
    }
    Ok(BoundaryField { points })
}
