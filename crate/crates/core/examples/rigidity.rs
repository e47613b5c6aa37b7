//! Ball sector in the quarter-plane cone: the torsion function is the radial
//! quadratic, so every deficit vanishes up to discretization error. Prints
//! the deficits on three meshes and the observed convergence orders.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serrin_lab::fem::solve_torsion;
use serrin_lab::geometry::{make_sector_domain, RadiusFn};
use serrin_lab::mesher::triangulate;
use serrin_lab::quantities::{compute_center, deficits, span_of};

fn main() -> serrin_lab::Result<()> {
    let spec = make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 256)?;
    let mut rows = Vec::new();
    for h in [0.05, 0.025, 0.0125] {
        let u = solve_torsion(Arc::new(triangulate(&spec, h)?), 2)?;
        let z = compute_center(&u, &span_of(&u)?);
        let r = deficits(&u, &z, None, None, "quarter")?;
        println!(
            "h = {h:<7} R = {:.8}  deficit_2 = {:.3e}  pseudodistance = {:.3e}  rho_gap = {:.3e}",
            r.r, r.deficit_2, r.pseudodistance, r.rho_gap
        );
        rows.push((h, r.deficit_2, r.pseudodistance));
    }
    for w in rows.windows(2) {
        let order = |a: f64, b: f64| (a / b).ln() / (w[0].0 / w[1].0).ln();
        println!("order: deficit_2 {:.2}, pseudodistance {:.2}", order(w[0].1, w[1].1), order(w[0].2, w[1].2));
    }
    Ok(())
}
