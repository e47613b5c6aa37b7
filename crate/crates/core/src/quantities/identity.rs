use rayon::prelude::*;

use super::boundary::normal_derivative;
use super::center::Center;
use super::EDGE_POINTS;
use crate::fem::FemField;
use crate::mesher::BoundaryTag;
use crate::numeric::pairwise_sum;
use crate::{Error, Result, DIM};

/// `h = q − u` with `q = |x − z|²/2` interpolated into the space of `u`.
pub fn h_field(u: &FemField, z: &Center) -> FemField {
    let q = FemField::interpolate(u.space.clone(), |x| 0.5 * (x - z.z).norm_squared());
    let values = q.values.iter().zip(&u.values).map(|(a, b)| a - b).collect();
    FemField { space: u.space.clone(), values }
}

/// Per element `|∇²u|² − (tr ∇²u)²/N` at the element Hessian, clamped at
/// zero for round-off negatives.
pub fn cs_deficit(u: &FemField) -> Result<Vec<f64>> {
    (0..u.space.num_elements())
        .map(|t| {
            let h = u.hessian_on(t)?;
            let d = h.norm_squared() - h.trace().powi(2) / DIM as f64;
            Ok(if d < 0.0 && d >= -1e-12 { 0.0 } else { d })
        })
        .collect()
}

/// Both sides of the integral identity and their relative mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `∫_{Γ1} u ⟨∇²u ∇u, ν⟩`, part of `lhs`.
    pub gamma1_term: f64,
    pub residual: f64,
    /// `lhs` with `Δu` replaced by the exact constant `N`.
    pub lhs_exact_laplacian: f64,
    pub residual_exact_laplacian: f64,
}

/// Evaluates the identity with `Δu = tr ∇²u` of the discrete field.
pub fn identity_residual(u: &FemField, z: &Center) -> Result<IdentityReport> {
    let space = &u.space;
    let n = DIM as f64;
    let gamma1 = space.boundary_quadrature(BoundaryTag::Gamma1, EDGE_POINTS);
    let worst = gamma1.iter().map(|p| p.normal.dot(&z.z).abs()).fold(0.0, f64::max);
    if worst > 1e-10 * (1.0 + z.z.norm()) {
        return Err(Error::CenterConstraint(worst));
    }

    let bulk: Vec<(f64, f64)> = (0..space.num_elements())
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let (mut a, mut b) = (0.0, 0.0);
            for q in space.quadrature(t, None) {
                let h = u.hessian_at(t, q.bary)?;
                let minus_u = -u.value_at(t, q.bary);
                let hh = h.norm_squared();
                a += q.weight * minus_u * (hh - h.trace().powi(2) / n);
                b += q.weight * minus_u * (hh - n);
            }
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let bulk_discrete = pairwise_sum(&bulk.iter().map(|p| p.0).collect::<Vec<_>>());
    let bulk_exact = pairwise_sum(&bulk.iter().map(|p| p.1).collect::<Vec<_>>());

    let g1: Vec<f64> = gamma1
        .iter()
        .map(|p| -> Result<f64> {
            let h = u.hessian_at(p.element, p.bary)?;
            let g = u.gradient_at(p.element, p.bary);
            Ok(p.weight * u.value_at(p.element, p.bary) * (h * g).dot(&p.normal))
        })
        .collect::<Result<_>>()?;
    let gamma1_term = pairwise_sum(&g1);

    let flux = normal_derivative(u)?;
    let length = flux.total_weight();
    let r = n * space.area() / length;
    let rhs = 0.5 * flux.integrate(|p| (p.u_nu.powi(2) - r * r) * (p.u_nu - (p.x - z.z).dot(&p.normal)));

    let lhs = bulk_discrete + gamma1_term;
    let lhs_exact = bulk_exact + gamma1_term;
    let h = space.mesh.h_max;
    let floor = r * r * length * h * h;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(floor);
    Ok(IdentityReport {
        lhs,
        rhs,
        gamma1_term,
        residual: rel(lhs, rhs),
        lhs_exact_laplacian: lhs_exact,
        residual_exact_laplacian: rel(lhs_exact, rhs),
    })
}
