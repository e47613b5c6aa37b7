use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use super::*;
use crate::geometry::{make_sector_domain, Cone2D};

fn disk() -> DomainSpec {
    DomainSpec::new(Cone2D::full_plane(), RadiusFn::constant(1.0), 256).unwrap()
}

fn quarter() -> DomainSpec {
    make_sector_domain(FRAC_PI_2, RadiusFn::constant(1.0), 128).unwrap()
}

#[test]
fn proportional_data_has_unit_slope() {
    let xs = [0.1, 0.2, 0.4, 0.8];
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
    let f = fit_log_log(&xs, &ys).unwrap();
    assert!((f.slope - 1.0).abs() < 1e-12);
    assert!((f.intercept - 2f64.ln()).abs() < 1e-12);
    assert!((f.r_squared - 1.0).abs() < 1e-12);
    assert!(f.ci_low <= f.slope && f.slope <= f.ci_high);
}

#[test]
fn quadratic_data_has_slope_two() {
    let xs = [0.05, 0.1, 0.2];
    let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
    assert!((fit_log_log(&xs, &ys).unwrap().slope - 2.0).abs() < 1e-12);
}

#[test]
fn fits_reject_bad_input() {
    assert!(fit_log_log(&[0.1, 0.2], &[0.1, 0.2]).is_err());
    assert!(fit_log_log(&[0.1, 0.0, 0.3], &[1.0, 2.0, 3.0]).is_err());
    assert!(fit_log_log(&[0.1, 0.2, 0.3], &[1.0, -2.0, 3.0]).is_err());
}

#[test]
fn log_profile_switches_at_inverse_e() {
    assert_eq!(log_profile(0.5), 0.5);
    let x = 1e-3;
    assert!((log_profile(x) - x * 1e3f64.ln()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn power_laws_recover_exponent(p in 0.25f64..3.0, c in 0.1f64..10.0, x0 in 1e-4f64..1e-1) {
        let xs: Vec<f64> = (0..5).map(|i| x0 * 2f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(p)).collect();
        let f = fit_log_log(&xs, &ys).unwrap();
        prop_assert!((f.slope - p).abs() < 1e-9);
        prop_assert!(f.r_squared > 1.0 - 1e-9);
    }
}

#[test]
fn disk_family_has_base_and_members() {
    let f = make_family("disk", disk(), 3, &[0.08, 0.02, 0.04]).unwrap();
    assert_eq!(f.members.len(), 4);
    assert_eq!(f.epsilons, vec![0.02, 0.04, 0.08]);
    assert_eq!(f.members[0].epsilon, 0.0);
    assert!(f.members[0].spec.radius.is_constant());
    assert_eq!(f.members[2].id, "disk_m3_eps0.04");
    let r = f.members[3].spec.radius.value(0.0);
    assert!((r - 1.08).abs() < 1e-14);
}

#[test]
fn quarter_family_keeps_the_cone() {
    let f = make_family("quarter", quarter(), 4, &[0.02, 0.04, 0.08]).unwrap();
    for m in &f.members {
        assert_eq!(m.spec.cone, f.base.cone);
    }
}

#[test]
fn family_validation() {
    assert!(make_family("disk", disk(), 3, &[]).is_err());
    assert!(make_family("disk", disk(), 3, &[0.02, -0.01]).is_err());
    assert!(make_family("disk", disk(), 3, &[0.02, 0.02]).is_err());
    assert!(make_family("disk", disk(), 0, &[0.02]).is_err());
    // 1 + 0.9 cos 3t stays positive; 1 + 1.2 cos 3t does not
    assert!(make_family("disk", disk(), 3, &[0.9]).is_ok());
    assert!(matches!(make_family("disk", disk(), 3, &[1.2]), Err(Error::InvalidDomain(_))));
    let reflex = DomainSpec::new(Cone2D::new(4.5).unwrap(), RadiusFn::constant(1.0), 64).unwrap();
    assert!(make_family("reflex", reflex, 3, &[0.02]).is_err());
}

#[test]
fn coarse_disk_sweep_end_to_end() {
    let family = make_family("disk", disk(), 3, &[0.02, 0.04, 0.08]).unwrap();
    let result = run_sweep(&family, &SweepOptions::new(0.1, 2)).unwrap();
    assert!(result.is_complete());
    assert_eq!(result.rows.len(), 4);
    assert_eq!(result.constants.k, 0);
    assert!(result.constants.eta.is_none());
    assert!(result.rows.windows(2).all(|w| w[0].epsilon < w[1].epsilon));
    // deficits grow with ε
    for col in ["deficit_1", "deficit_2", "pseudodistance", "rho_gap"] {
        let v: Vec<f64> = result.rows.iter().map(|r| r.column(col).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] > 0.95 * w[0]), "{col}: {v:?}");
    }
    assert_eq!(result.fits.len(), 2);
    let lip = &result.fits[0];
    assert!((0.8..=1.2).contains(&lip.fit.slope), "slope {}", lip.fit.slope);

    let verdicts = verify_theorems(&result).unwrap();
    assert!(verdicts.iter().any(|v| v.check == Check::ClassicalGradient));
    assert!(verdicts.iter().any(|v| v.status == Status::OutOfScope));
    for v in verdicts.iter().filter(|v| v.check == Check::LipschitzPseudodistance) {
        assert_eq!(v.status, Status::Pass, "{v:?}");
    }

    let csv = result.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), crate::quantities::CSV_COLUMNS.join(","));
    assert!(csv.lines().nth(1).unwrap().starts_with("disk_m3_eps0,"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("#FIT,deficit")).count(), 2);
    let svg = svg_loglog(&result, lip);
    assert!(svg.starts_with("<svg") && svg.contains("<circle"));
    let table = verdicts_csv(&verdicts).unwrap();
    assert_eq!(table.lines().count(), verdicts.len() + 1);
}

#[test]
fn unknown_column_is_rejected() {
    let family = make_family("quarter", quarter(), 4, &[0.02, 0.04, 0.08]).unwrap();
    let result = run_sweep(&family, &SweepOptions::new(0.15, 2)).unwrap();
    assert!(result.is_complete(), "{:?}", result.failures);
    assert_eq!(result.constants.k, 2);
    assert!(result.constants.eta.is_some());
    assert!(fit_exponent(&result, "deficit_2", "nope").is_err());
    // no classical checks outside the full plane
    let verdicts = verify_theorems(&result).unwrap();
    assert!(!verdicts.iter().any(|v| v.check == Check::ClassicalTorsionMax));
}
