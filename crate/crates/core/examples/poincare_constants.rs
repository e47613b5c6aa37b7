//! Weighted Poincaré constants: μ on the disk and the unit square against
//! their classical values, η on the quarter and half disk, and the
//! dependence of both on the weight exponent α.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serrin_lab::geometry::{boundary_partition, make_sector_domain, normal_span, Cone2D, DomainSpec, RadiusFn};
use serrin_lab::mesher::{rectangle, triangulate};
use serrin_lab::poincare::{estimate_with_history, eta_eigenvalue, eta_estimate, lambda_constant, mu_estimate};

// first positive zero of J_1'
const J1_PRIME: f64 = 1.841_183_781_340_659;

fn main() -> serrin_lab::Result<()> {
    let disk = DomainSpec::new(Cone2D::full_plane(), RadiusFn::constant(1.0), 256)?;
    let mu = mu_estimate(&Arc::new(triangulate(&disk, 0.025)?), 0.0)?;
    println!("disk   mu_2,0 = {:.5}  (exact {J1_PRIME:.5})", mu.value);
    let square = mu_estimate(&Arc::new(rectangle(1.0, 1.0, 40, 40)?), 0.0)?;
    println!("square mu_2,0 = {:.5}  (exact {PI:.5})", square.value);

    for (name, opening) in [("quarter", FRAC_PI_2), ("half", PI)] {
        let spec = make_sector_domain(opening, RadiusFn::constant(1.0), 256)?;
        let span = normal_span(&boundary_partition(&spec));
        let mesh = Arc::new(triangulate(&spec, 0.05)?);
        let (free, _) = eta_eigenvalue(&mesh, &span, 0.0, false)?;
        println!("{name:<7} k = {}  unconstrained eigenvalue {free:.2e}", span.k);
        for alpha in [0.0, 0.5, 1.0] {
            let mu = estimate_with_history(&mesh, 3, |m| mu_estimate(m, alpha))?;
            let eta = estimate_with_history(&mesh, 3, |m| eta_estimate(m, &span, alpha))?;
            let lambda = lambda_constant(span.k, Some(mu.value), Some(eta.value))?;
            let hist = |h: &[(usize, f64)]| h.iter().map(|(_, v)| format!("{v:.4}")).collect::<Vec<_>>().join(" → ");
            println!("  alpha = {alpha}: mu {}  eta {}  Lambda = {lambda:.4}", hist(&mu.history), hist(&eta.history));
        }
    }
    Ok(())
}
