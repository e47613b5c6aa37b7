//! Perturbed-disk and perturbed-quarter-disk sweeps: deficits per member,
//! the fitted exponents and the verdict table.
//!
//! cargo run --release --example stability_sweep -- [h_target]

use std::f64::consts::FRAC_PI_2;

use serrin_lab::geometry::{make_sector_domain, Cone2D, DomainSpec, RadiusFn};
use serrin_lab::stability::{make_family, run_sweep, verify_theorems, Status, SweepOptions};

fn main() -> serrin_lab::Result<()> {
    let h: f64 = std::env::args().nth(1).map(|s| s.parse().expect("h_target")).unwrap_or(0.05);
    let eps = [0.02, 0.04, 0.08];
    let families = [
        ("disk", DomainSpec::new(Cone2D::full_plane(), RadiusFn::constant(1.0), 256)?, 3),
        ("quarter", make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 128)?, 4),
    ];
    for (name, base, mode) in families {
        let family = make_family(name, base, mode, &eps)?;
        let result = run_sweep(&family, &SweepOptions::new(h, 2))?;
        let c = &result.constants;
        println!(
            "{name}: k = {}, mu = {:.4}, eta = {}, Lambda = {:.4}",
            c.k,
            c.mu.value,
            c.eta.as_ref().map_or("-".into(), |e| format!("{:.4}", e.value)),
            c.lambda
        );
        println!("  eps      deficit_1  deficit_2  pseudodist rho_gap    C_bound    max|grad u| max(-u)");
        for r in &result.rows {
            let d = &r.report;
            println!(
                "  {:<8} {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:>9.3}  {:.4}      {:.4}",
                r.epsilon,
                d.deficit_1,
                d.deficit_2,
                d.pseudodistance,
                d.rho_gap,
                d.c_bound.unwrap_or(f64::NAN),
                r.max_grad,
                r.max_neg_u
            );
        }
        for f in &result.fits {
            println!(
                "  fit {} vs {}: slope {:.3} [{:.3}, {:.3}], r2 {:.4}; log profile slope {:.3}",
                f.y_column, f.x_column, f.fit.slope, f.fit.ci_low, f.fit.ci_high, f.fit.r_squared, f.log_profile.slope
            );
        }
        let verdicts = verify_theorems(&result)?;
        for v in verdicts.iter().filter(|v| v.status != Status::Pass) {
            println!("  {:?} eps={:?}: {} ({})", v.check, v.epsilon, v.status, v.note);
        }
        println!("  {} of {} verdicts pass", verdicts.iter().filter(|v| v.status == Status::Pass).count(), verdicts.len());
    }
    Ok(())
}
