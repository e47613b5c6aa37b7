//! L² error of P1, straight P2 and curved P2 against the exact sector
//! solution (|x|² − 1)/2 on the quarter disk, over three refinements.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serrin_lab::fem::{assemble_with, solve};
use serrin_lab::geometry::{make_sector_domain, RadiusFn};
use serrin_lab::mesher::{refine, triangulate};
use serrin_lab::Point;

fn main() -> serrin_lab::Result<()> {
    let spec = make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 256)?;
    let exact = |x: Point| 0.5 * (x.norm_squared() - 1.0);
    for (label, degree, curved) in [("P1", 1, false), ("P2 straight", 2, false), ("P2 curved", 2, true)] {
        let mut mesh = Arc::new(triangulate(&spec, 0.1)?);
        let mut errors = Vec::new();
        for _ in 0..4 {
            let u = solve(&assemble_with(mesh.clone(), degree, 2, curved)?)?;
            errors.push((mesh.h_max, u.l2_error(exact)));
            mesh = Arc::new(refine(&mesh));
        }
        println!("{label}");
        for (i, (h, e)) in errors.iter().enumerate() {
            let order = if i > 0 { format!("{:.2}", (errors[i - 1].1 / e).log2()) } else { "-".into() };
            println!("  h_max = {h:.4e}  L2 error = {e:.4e}  order {order}");
        }
    }
    Ok(())
}
