use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::*;
use crate::fem::{solve_torsion, FemField, FemSpace};
use crate::geometry::{interior_sphere_radius, make_sector_domain, Cone2D, DomainSpec, RadiusFn};
use crate::mesher::{refine, triangulate};
use crate::Point;

fn solved(spec: &DomainSpec, h: f64) -> FemField {
    solve_torsion(Arc::new(triangulate(spec, h).unwrap()), 2).unwrap()
}

fn quarter_disk() -> DomainSpec {
    make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 256).unwrap()
}

fn disk() -> DomainSpec {
    DomainSpec::new(Cone2D::full_plane(), RadiusFn::constant(1.0), 256).unwrap()
}

fn perturbed_disk(eps: f64) -> DomainSpec {
    DomainSpec::new(Cone2D::full_plane(), RadiusFn::fourier(1.0, [(3, eps)]), 512).unwrap()
}

fn perturbed_quarter(eps: f64) -> DomainSpec {
    make_sector_domain(FRAC_PI_2, RadiusFn::fourier(1.0, [(4, eps)]), 256).unwrap()
}

fn shifted_half_disk() -> DomainSpec {
    make_sector_domain(PI, RadiusFn::offset_circle([0.3, 0.0], 1.0), 512).unwrap()
}

fn report(u: &FemField) -> DeficitReport {
    let z = compute_center(u, &span_of(u).unwrap());
    deficits(u, &z, Some(1.0), None, "test").unwrap()
}

#[test]
fn rigid_flux_is_one() {
    for spec in [quarter_disk(), shifted_half_disk()] {
        let u = solved(&spec, 0.025);
        let flux = normal_derivative(&u).unwrap();
        for p in &flux.points {
            assert!((p.u_nu - 1.0).abs() <= 5e-3, "u_nu = {} at {:?}", p.u_nu, p.x);
        }
        assert!((flux.total_weight() - spec.gamma0_length()).abs() < 1e-5);
    }
}

#[test]
fn centers_of_reference_domains() {
    let u = solved(&shifted_half_disk(), 0.05);
    let span = span_of(&u).unwrap();
    assert_eq!(span.k, 1);
    let z = compute_center(&u, &span);
    assert!((z.z - Point::new(0.3, 0.0)).norm() <= 1e-3, "{:?}", z.z);
    assert!(z.z.y.abs() <= 1e-15);

    let u = solved(&quarter_disk(), 0.05);
    let z = compute_center(&u, &span_of(&u).unwrap());
    assert_eq!(z.z, Point::zeros());
    assert!(alternative_center(&u).z.norm() <= 1e-3);

    let u = solved(&disk(), 0.05);
    let z = compute_center(&u, &span_of(&u).unwrap());
    assert!(z.z.norm() <= 1e-3);
    assert!((alternative_center(&u).z - z.z).norm() <= 1e-10);

    let u = solved(&perturbed_disk(0.05), 0.05);
    assert!(alternative_center(&u).z.norm() <= 0.01);
}

#[test]
fn h_of_rigid_solution_is_flat() {
    let u = solved(&quarter_disk(), 0.05);
    let z = compute_center(&u, &span_of(&u).unwrap());
    let h = h_field(&u, &z);
    for t in 0..u.space.num_elements() {
        let g = h.gradient_at(t, [1.0 / 3.0; 3]);
        assert!(g.norm() <= 5e-3);
    }
    for p in u.space.boundary_quadrature(crate::mesher::BoundaryTag::Gamma1, 3) {
        assert!(h.gradient_at(p.element, p.bary).dot(&p.normal).abs() <= 5e-3);
    }
}

#[test]
fn hessian_of_h_is_identity_minus_hessian_of_u() {
    let spec = perturbed_quarter(0.05);
    let space = Arc::new(FemSpace::new(Arc::new(triangulate(&spec, 0.1).unwrap()), 2, false).unwrap());
    let u = crate::fem::solve(&crate::fem::assemble_poisson(space, |_| 2.0, |_| 0.0).unwrap()).unwrap();
    let z = compute_center(&u, &span_of(&u).unwrap());
    let h = h_field(&u, &z);
    let cs = cs_deficit(&u).unwrap();
    for t in 0..u.space.num_elements() {
        let hu = u.hessian_on(t).unwrap();
        let hh = h.hessian_on(t).unwrap();
        assert!((hh - (nalgebra::Matrix2::identity() - hu)).amax() < 1e-10);
        // |∇²h|² − CS deficit = (tr ∇²u − N)²/N, zero when the trace is exact
        let gap = hh.norm_squared() - cs[t] - (hu.trace() - 2.0).powi(2) / 2.0;
        assert!(gap.abs() < 1e-10);
    }
}

#[test]
fn deviatoric_quadratic_has_deficit_eight() {
    let space = Arc::new(FemSpace::new(Arc::new(triangulate(&quarter_disk(), 0.2).unwrap()), 2, false).unwrap());
    let f = FemField::interpolate(space, |x| x.x * x.x - x.y * x.y);
    for d in cs_deficit(&f).unwrap() {
        assert!((d - 8.0).abs() < 1e-9);
    }
}

#[test]
fn rigidity_report_is_near_zero() {
    let u = solved(&quarter_disk(), 0.025);
    let r = report(&u);
    assert!(r.deficit_2 <= 1e-2 && r.pseudodistance <= 1e-2 && r.rho_gap <= 1e-2, "{r:?}");
    assert!(r.identity_lhs.abs() <= 1e-3 * 0.5 * PI && r.identity_rhs.abs() <= 1e-3 * 0.5 * PI);
    assert!(r.identity_residual <= 1.0);
    assert!(r.m > 0.0 && r.c_bound_satisfied);
    assert!(r.deficit_2 >= 2.0 * r.m * r.deficit_1 - 1e-12);
    for c in cs_deficit(&u).unwrap() {
        assert!(c <= 1e-2);
    }
}

#[test]
fn identity_residual_decreases_on_perturbed_domains() {
    for spec in [perturbed_disk(0.05), perturbed_quarter(0.05)] {
        let mut mesh = Arc::new(triangulate(&spec, 0.05).unwrap());
        let mut res = Vec::new();
        for _ in 0..2 {
            let u = solve_torsion(mesh.clone(), 2).unwrap();
            let r = report(&u);
            assert!(r.gamma1_term >= -1e-6);
            assert!(r.deficit_2 >= 2.0 * r.m * r.deficit_1 - 1e-12);
            res.push(r.identity_residual);
            mesh = Arc::new(refine(&mesh));
        }
        assert!(res[1] < res[0], "{res:?}");
        assert!(res[1] <= 0.05, "{res:?}");
    }
}

#[test]
fn triangle_inequality_decomposition() {
    let u = solved(&perturbed_disk(0.04), 0.05);
    let r = report(&u);
    assert!(r.pseudodistance <= r.grad_h_gamma0 + r.deficit_1 + 1e-9, "{r:?}");
}

#[test]
fn mean_flux_is_serrin_radius() {
    let u = solved(&perturbed_quarter(0.05), 0.025);
    let r = report(&u);
    assert!((r.mean_u_nu - r.r).abs() <= 1e-3);
}

#[test]
fn report_is_rotation_invariant() {
    let spec = perturbed_quarter(0.05);
    let a = report(&solved(&spec, 0.1));
    let b = report(&solved(&spec.rotated(0.7), 0.1));
    for (x, y) in [
        (a.deficit_1, b.deficit_1),
        (a.deficit_2, b.deficit_2),
        (a.pseudodistance, b.pseudodistance),
        (a.identity_lhs, b.identity_lhs),
        (a.identity_rhs, b.identity_rhs),
    ] {
        assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
    }
}

#[test]
fn center_off_the_constraint_is_rejected() {
    let u = solved(&quarter_disk(), 0.1);
    let mut z = compute_center(&u, &span_of(&u).unwrap());
    z.z = Point::new(0.1, 0.0);
    assert!(matches!(identity_residual(&u, &z), Err(crate::Error::CenterConstraint(_))));
}

#[test]
fn csv_row_layout() {
    let r = report(&solved(&quarter_disk(), 0.1));
    let row = r.csv_record();
    assert_eq!(row.len(), CSV_COLUMNS.len());
    assert_eq!(row[0], "test");
    assert_eq!(row[16], "true");
}

#[test]
fn distance_bounds_hold() {
    for spec in [quarter_disk(), disk(), perturbed_disk(0.05), perturbed_quarter(0.05)] {
        let u = solved(&spec, 0.05);
        let ri = interior_sphere_radius(&spec).radius;
        let b = u_distance_bounds(&u, &spec, ri).unwrap();
        assert!(!b.flagged(), "{b:?}");
        assert!(b.improved_applies);
    }
    let u = solved(&disk(), 0.025);
    let c = -u.evaluate(Point::zeros()).unwrap();
    assert!((c - 0.5).abs() <= 2e-3);
}
