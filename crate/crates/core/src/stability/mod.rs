//! Perturbation families, parallel sweeps over their members, empirical
//! exponent fits and row-wise checks of the stability inequalities.

use std::sync::Arc;

use rayon::prelude::*;

use crate::fem::{solve_torsion, FemField};
use crate::geometry::{
    boundary_partition, diameter, exterior_sphere_radius, interior_sphere_radius, DomainSpec, RadiusFn,
};
use crate::mesher::{triangulate, TaggedMesh};
use crate::poincare::{eta_estimate, lambda_constant, mu_estimate, PoincareEstimate};
use crate::quantities::{
    alternative_center, compute_center, deficits, span_of, u_distance_bounds, DeficitReport, DistanceBounds,
};
use crate::{Error, Result};

mod fit;
mod output;
mod verdict;

pub use fit::{fit_exponent, fit_log_log, log_profile, ExponentFit, LinearFit};
pub use output::{svg_loglog, verdicts_csv, VERDICT_COLUMNS};
pub use verdict::{verify_theorems, Check, Status, Verdict, RATIO_SPREAD};

/// One domain of a family.
#[derive(Debug, Clone)]
pub struct Member {
    pub epsilon: f64,
    pub spec: DomainSpec,
    pub id: String,
}

/// Base domain and its radial perturbations
/// `r_ε(t) = r_base(t)(1 + ε cos(m t))`; the first member is the base.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub base: DomainSpec,
    pub mode: u32,
    pub epsilons: Vec<f64>,
    pub members: Vec<Member>,
}

fn member_id(name: &str, mode: u32, eps: f64) -> String {
    format!("{name}_m{mode}_eps{eps}")
}

/// Builds and validates a family. `epsilons` must be positive and distinct;
/// they are sorted. Every member has to be a positive radial graph (hence
/// star-shaped about the vertex) over the base's cone, which must be convex.
pub fn make_family(name: &str, base: DomainSpec, mode: u32, epsilons: &[f64]) -> Result<Family> {
    if epsilons.is_empty() {
        return Err(Error::InvalidArgument("epsilon list is empty".into()));
    }
    if mode == 0 {
        return Err(Error::InvalidArgument("perturbation mode must be at least 1".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidArgument(format!("epsilon {e} is not positive")));
    }
    base.cone.require_convex()?;
    let mut eps = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("epsilon list has duplicates".into()));
    }
    let mut members = vec![Member { epsilon: 0.0, spec: base.clone(), id: member_id(name, mode, 0.0) }];
    for &e in &eps {
        let radius = RadiusFn::modulated(base.radius.clone(), e, mode);
        let spec = DomainSpec::new(base.cone, radius, base.samples)
            .map_err(|err| Error::InvalidDomain(format!("member ε = {e}: {err}")))?;
        members.push(Member { epsilon: e, spec, id: member_id(name, mode, e) });
    }
    Ok(Family { name: name.to_string(), base, mode, epsilons: eps, members })
}

/// Resolution policy and constants of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub h_target: f64,
    pub degree: usize,
    /// Weight exponent of the Poincaré constants in the bound.
    pub alpha: f64,
    /// Also estimate `Λ` on the largest-ε member and report it.
    pub reestimate_largest: bool,
}

impl SweepOptions {
    pub fn new(h_target: f64, degree: usize) -> Self {
        Self { h_target, degree, alpha: 1.0, reestimate_largest: false }
    }
}

/// Poincaré constants on one mesh and the `Λ` they give.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub k: usize,
    pub mu: PoincareEstimate,
    pub eta: Option<PoincareEstimate>,
    /// `Λ_{2,α}(k)`, for the center with constrained components.
    pub lambda: f64,
    /// `μ⁻¹`, for the alternative center.
    pub lambda_alternative: f64,
}

/// Estimates `μ` (always) and `η` (when `k ≥ 1`) on `mesh`.
pub fn estimate_constants(mesh: &Arc<TaggedMesh>, spec: &DomainSpec, alpha: f64) -> Result<Constants> {
    let span = crate::geometry::normal_span(&boundary_partition(spec));
    let mu = mu_estimate(mesh, alpha)?;
    let eta = if span.k > 0 { Some(eta_estimate(mesh, &span, alpha)?) } else { None };
    let lambda = lambda_constant(span.k, Some(mu.value), eta.as_ref().map(|e| e.value))?;
    Ok(Constants { k: span.k, lambda_alternative: 1.0 / mu.value, mu, eta, lambda })
}

/// Everything measured on one member.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub epsilon: f64,
    /// Constrained center, constant from `Λ`.
    pub report: DeficitReport,
    /// Alternative center, constant from `μ⁻¹`.
    pub alternative: DeficitReport,
    pub r_i: f64,
    /// Exterior sphere radius; infinite for convex members.
    pub r_e: f64,
    pub diameter: f64,
    pub max_grad: f64,
    pub max_neg_u: f64,
    pub bounds: DistanceBounds,
}

impl SweepRow {
    /// Numeric column by name, for fits.
    pub fn column(&self, name: &str) -> Option<f64> {
        let r = &self.report;
        Some(match name {
            "epsilon" => self.epsilon,
            "h_max" => r.h_max,
            "R" => r.r,
            "m" => r.m,
            "deficit_1" => r.deficit_1,
            "deficit_2" => r.deficit_2,
            "pseudodistance" => r.pseudodistance,
            "rho_e" => r.rho_e,
            "rho_i" => r.rho_i,
            "rho_gap" => r.rho_gap,
            "identity_lhs" => r.identity_lhs,
            "identity_rhs" => r.identity_rhs,
            "gamma1_term" => r.gamma1_term,
            "identity_residual" => r.identity_residual,
            "grad_h_gamma0" => r.grad_h_gamma0,
            "alt_pseudodistance" => self.alternative.pseudodistance,
            "alt_rho_gap" => self.alternative.rho_gap,
            "max_grad" => self.max_grad,
            "max_neg_u" => self.max_neg_u,
            _ => return None,
        })
    }
}

/// A member whose pipeline failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub epsilon: f64,
    pub message: String,
    pub exit_code: i32,
}

/// Rows in ε order (base first), constants and default fits.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub family: String,
    pub mode: u32,
    pub options: SweepOptions,
    pub constants: Constants,
    /// Constants re-estimated on the largest member, if requested.
    pub largest_constants: Option<Constants>,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<ExponentFit>,
    pub failures: Vec<Failure>,
}

impl SweepResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    /// Rows with `ε > 0`.
    pub fn perturbed(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.epsilon > 0.0)
    }
}

/// The fits computed for every sweep: the Lipschitz pseudodistance profile
/// and the `ρe − ρi` profile (linear, with the log-linear variant inside).
pub const DEFAULT_FITS: [(&str, &str); 2] = [("deficit_2", "pseudodistance"), ("deficit_1", "rho_gap")];

fn max_gradient(u: &FemField) -> f64 {
    let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    (0..u.space.num_elements())
        .map(|t| {
            let at_points = u.space.quadrature(t, None).into_iter().map(|q| u.gradient_at(t, q.bary).norm());
            let at_corners = corners.iter().map(|&l| u.gradient_at(t, l).norm());
            at_points.chain(at_corners).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn run_member(member: &Member, options: &SweepOptions, constants: &Constants) -> Result<SweepRow> {
    let mesh = Arc::new(triangulate(&member.spec, options.h_target)?);
    let u = solve_torsion(mesh, options.degree)?;
    let span = span_of(&u)?;
    let center = compute_center(&u, &span);
    let alt = alternative_center(&u);
    let sphere = interior_sphere_radius(&member.spec);
    let r_i = (!sphere.degenerate).then_some(sphere.radius);
    let report = deficits(&u, &center, Some(constants.lambda), r_i, &member.id)?;
    let alternative = deficits(&u, &alt, Some(constants.lambda_alternative), r_i, &member.id)?;
    let bounds = u_distance_bounds(&u, &member.spec, sphere.radius)?;
    Ok(SweepRow {
        epsilon: member.epsilon,
        report,
        alternative,
        r_i: sphere.radius,
        r_e: exterior_sphere_radius(&member.spec),
        diameter: diameter(&boundary_partition(&member.spec)),
        max_grad: max_gradient(&u),
        max_neg_u: -u.min_value(),
        bounds,
    })
}

/// Runs mesh, solve, center and deficits on every member in parallel and
/// merges the rows in ε order. `Λ` is estimated once on the base member's
/// mesh and reused for every row. Member failures are recorded in
/// [`SweepResult::failures`] instead of aborting the other members; a
/// failure of the base constants is an error.
pub fn run_sweep(family: &Family, options: &SweepOptions) -> Result<SweepResult> {
    if !(options.h_target > 0.0) {
        return Err(Error::InvalidArgument(format!("h_target {} is not positive", options.h_target)));
    }
    if options.degree != 2 {
        return Err(Error::Degree { required: 2, actual: options.degree });
    }
    let base_mesh = Arc::new(triangulate(&family.base, options.h_target)?);
    let constants = estimate_constants(&base_mesh, &family.base, options.alpha)?;
    let largest_constants = match (options.reestimate_largest, family.members.last()) {
        (true, Some(last)) if last.epsilon > 0.0 => {
            let mesh = Arc::new(triangulate(&last.spec, options.h_target)?);
            Some(estimate_constants(&mesh, &last.spec, options.alpha)?)
        }
        _ => None,
    };
    let outcomes: Vec<Result<SweepRow>> =
        family.members.par_iter().map(|m| run_member(m, options, &constants)).collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (member, outcome) in family.members.iter().zip(outcomes) {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => {
                log::error!("{}: {e}", member.id);
                failures.push(Failure { epsilon: member.epsilon, message: e.to_string(), exit_code: e.exit_code() });
            }
        }
    }
    let mut result = SweepResult {
        family: family.name.clone(),
        mode: family.mode,
        options: options.clone(),
        constants,
        largest_constants,
        rows,
        fits: Vec::new(),
        failures,
    };
    result.fits = DEFAULT_FITS
        .iter()
        .filter_map(|&(x, y)| match fit_exponent(&result, x, y) {
            Ok(f) => Some(f),
            Err(e) => {
                log::warn!("fit {y} vs {x} skipped: {e}");
                None
            }
        })
        .collect();
    Ok(result)
}

#[cfg(test)]
mod tests;
