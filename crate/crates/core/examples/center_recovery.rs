//! The center z for k = 0, 1, 2: full disk (all components free), half
//! disk B₁((0.3, 0)) ∩ {y > 0} (one component fixed) and quarter disk
//! (z = 0 by construction), next to the alternative center.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serrin_lab::fem::solve_torsion;
use serrin_lab::geometry::{make_sector_domain, Cone2D, DomainSpec, RadiusFn};
use serrin_lab::mesher::triangulate;
use serrin_lab::quantities::{alternative_center, compute_center, span_of};

fn main() -> serrin_lab::Result<()> {
    let domains = [
        ("disk", DomainSpec::new(Cone2D::full_plane(), RadiusFn::constant(1.0), 256)?),
        ("shifted half disk", make_sector_domain(PI, RadiusFn::offset_circle([0.3, 0.0], 1.0), 512)?),
        ("quarter disk", make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 256)?),
    ];
    for (name, spec) in domains {
        let u = solve_torsion(Arc::new(triangulate(&spec, 0.025)?), 2)?;
        let span = span_of(&u)?;
        let z = compute_center(&u, &span);
        let alt = alternative_center(&u);
        println!(
            "{name:<18} k = {}  z = ({:+.6}, {:+.6})  alternative = ({:+.6}, {:+.6})",
            span.k, z.z.x, z.z.y, alt.z.x, alt.z.y
        );
    }
    Ok(())
}
