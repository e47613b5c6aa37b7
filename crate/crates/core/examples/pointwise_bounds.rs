//! Lower bounds of −u by the distance to the boundary: ½δ², ½δ_{Γ0}² and,
//! for orthogonal corners, (r_i/2)δ_{Γ0}. Prints the worst margin of each.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serrin_lab::fem::solve_torsion;
use serrin_lab::geometry::{interior_sphere_radius, make_sector_domain, Cone2D, DomainSpec, RadiusFn};
use serrin_lab::mesher::triangulate;
use serrin_lab::quantities::u_distance_bounds;

fn main() -> serrin_lab::Result<()> {
    let domains = [
        ("disk", DomainSpec::new(Cone2D::full_plane(), RadiusFn::constant(1.0), 256)?),
        ("perturbed disk", DomainSpec::new(Cone2D::full_plane(), RadiusFn::fourier(1.0, [(3, 0.05)]), 512)?),
        ("quarter disk", make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 256)?),
        ("perturbed quarter", make_sector_domain(FRAC_PI_2, RadiusFn::fourier(1.0, [(4, 0.05)]), 256)?),
        ("shifted half disk", make_sector_domain(PI, RadiusFn::offset_circle([0.3, 0.0], 1.0), 512)?),
    ];
    for (name, spec) in domains {
        let r_i = interior_sphere_radius(&spec).radius;
        let u = solve_torsion(Arc::new(triangulate(&spec, 0.025)?), 2)?;
        let b = u_distance_bounds(&u, &spec, r_i)?;
        let improved = b.margin_improved.map_or("n/a".to_string(), |m| format!("{m:+.3e}"));
        println!(
            "{name:<18} r_i = {r_i:.4}  ½δ²: {:+.3e}  ½δ_Γ0²: {:+.3e}  (r_i/2)δ_Γ0: {improved}  flagged: {}",
            b.margin_boundary,
            b.margin_gamma0,
            b.flagged()
        );
    }
    Ok(())
}
