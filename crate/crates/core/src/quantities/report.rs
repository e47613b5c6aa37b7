use super::boundary::normal_derivative;
use super::center::Center;
use super::identity::{identity_residual, IdentityReport};
use crate::fem::FemField;
use crate::geometry::{boundary_partition, rho_extremes};
use crate::poincare::theorem_constant;
use crate::{Error, Result, DIM};

/// CSV column order of a report row.
pub const CSV_COLUMNS: [&str; 17] = [
    "domain_id",
    "h_max",
    "degree",
    "R",
    "m",
    "z_x",
    "z_y",
    "deficit_1",
    "deficit_2",
    "pseudodistance",
    "rho_gap",
    "identity_lhs",
    "identity_rhs",
    "gamma1_term",
    "identity_residual",
    "C_bound",
    "C_bound_satisfied",
];

/// Scalar functionals of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficitReport {
    pub domain_id: String,
    pub h_max: f64,
    pub degree: usize,
    pub r: f64,
    /// Minimum of `u_ν` on `Γ0` outside the corner collar.
    pub m: f64,
    pub z: crate::Point,
    pub k: usize,
    /// `‖u_ν − R‖_{L²(Γ0)}`.
    pub deficit_1: f64,
    /// `‖u_ν² − R²‖_{L²(Γ0)}`.
    pub deficit_2: f64,
    /// `‖|x − z| − R‖_{L²(Γ0)}`.
    pub pseudodistance: f64,
    pub rho_e: f64,
    pub rho_i: f64,
    pub rho_gap: f64,
    pub identity_lhs: f64,
    pub identity_rhs: f64,
    pub gamma1_term: f64,
    pub identity_residual: f64,
    pub identity_residual_exact_laplacian: f64,
    /// `‖∇h‖_{L²(Γ0)}`.
    pub grad_h_gamma0: f64,
    pub mean_u_nu: f64,
    pub collar_edges: usize,
    /// `Λ` used for the constant, when supplied.
    pub lambda: Option<f64>,
    pub c_bound: Option<f64>,
    pub c_bound_satisfied: bool,
    /// Constant with `m` replaced by the interior sphere radius.
    pub c_bound_sphere: Option<f64>,
    /// Set when `m ≤ 0` blocked the constant.
    pub degenerate: bool,
}

/// Fills a report. `lambda` is `Λ_{2,1}(k)` (or the alternative-center
/// constant); `r_i` the interior sphere radius if known.
pub fn deficits(
    u: &FemField,
    z: &Center,
    lambda: Option<f64>,
    r_i: Option<f64>,
    domain_id: &str,
) -> Result<DeficitReport> {
    let flux = normal_derivative(u)?;
    let length = flux.total_weight();
    let r = DIM as f64 * u.space.area() / length;
    let m = flux.min_excluding_collar();
    let zz = z.z;
    let deficit_1 = flux.integrate(|p| (p.u_nu - r).powi(2)).sqrt();
    let deficit_2 = flux.integrate(|p| (p.u_nu.powi(2) - r * r).powi(2)).sqrt();
    let pseudodistance = flux.integrate(|p| ((p.x - zz).norm() - r).powi(2)).sqrt();
    let grad_h_gamma0 = flux
        .integrate(|p| {
            let g = u.gradient_at(p.element, p.bary);
            (p.x - zz - g).norm_squared()
        })
        .sqrt();
    let (rho_e, rho_i) = match &u.space.mesh.domain {
        Some(domain) => rho_extremes(&boundary_partition(domain), zz),
        None => flux.points.iter().fold((0.0_f64, f64::INFINITY), |(e, i), p| {
            let d = (p.x - zz).norm();
            (e.max(d), i.min(d))
        }),
    };
    // the alternative center may point across Γ1, where the identity does
    // not hold; its columns are left undefined then
    let id = match identity_residual(u, z) {
        Err(Error::CenterConstraint(_)) if z.alternative => IdentityReport {
            lhs: f64::NAN,
            rhs: f64::NAN,
            gamma1_term: f64::NAN,
            residual: f64::NAN,
            lhs_exact_laplacian: f64::NAN,
            residual_exact_laplacian: f64::NAN,
        },
        other => other?,
    };

    let degenerate = !(m > 0.0);
    let c_bound = match lambda {
        Some(l) if !degenerate => Some(theorem_constant(m, l, DIM)?),
        _ => None,
    };
    let c_bound_sphere = match (lambda, r_i) {
        (Some(l), Some(ri)) if ri > 0.0 => Some(theorem_constant(ri, l, DIM)?),
        _ => None,
    };
    let c_bound_satisfied = c_bound.is_some_and(|c| pseudodistance <= c * deficit_2 + 1e-12);
    if degenerate {
        log::warn!("{domain_id}: min u_ν = {m:.3e} ≤ 0, constant bound skipped");
    }
    Ok(DeficitReport {
        domain_id: domain_id.to_string(),
        h_max: u.space.mesh.h_max,
        degree: u.degree(),
        r,
        m,
        z: zz,
        k: z.k,
        deficit_1,
        deficit_2,
        pseudodistance,
        rho_e,
        rho_i,
        rho_gap: rho_e - rho_i,
        identity_lhs: id.lhs,
        identity_rhs: id.rhs,
        gamma1_term: id.gamma1_term,
        identity_residual: id.residual,
        identity_residual_exact_laplacian: id.residual_exact_laplacian,
        grad_h_gamma0,
        mean_u_nu: flux.mean(),
        collar_edges: flux.collar_edges(),
        lambda,
        c_bound,
        c_bound_satisfied,
        c_bound_sphere,
        degenerate,
    })
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

impl DeficitReport {
    /// Fields in [`CSV_COLUMNS`] order.
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.domain_id.clone(),
            num(self.h_max),
            self.degree.to_string(),
            num(self.r),
            num(self.m),
            num(self.z.x),
            num(self.z.y),
            num(self.deficit_1),
            num(self.deficit_2),
            num(self.pseudodistance),
            num(self.rho_gap),
            num(self.identity_lhs),
            num(self.identity_rhs),
            num(self.gamma1_term),
            num(self.identity_residual),
            self.c_bound.map(num).unwrap_or_default(),
            self.c_bound_satisfied.to_string(),
        ]
    }
}
