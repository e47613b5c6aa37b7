use rayon::prelude::*;

use crate::fem::FemField;
use crate::geometry::{boundary_partition, orthogonal_corners, DomainSpec};
use crate::Result;

/// Slack allowed for discretization error in pointwise checks.
pub const FEM_TOLERANCE: f64 = 5e-3;

/// Worst margins of the lower bounds of `−u` in terms of distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceBounds {
    /// `min(−u − δ_∂²/2)`.
    pub margin_boundary: f64,
    /// `min(−u − δ_{Γ0}²/2)`.
    pub margin_gamma0: f64,
    /// `min(−u − (r_i/2) δ_{Γ0})`, when its hypotheses hold.
    pub margin_improved: Option<f64>,
    pub improved_applies: bool,
    pub points_checked: usize,
    /// Points where some margin is below `−FEM_TOLERANCE`.
    pub violations: usize,
}

impl DistanceBounds {
    pub fn flagged(&self) -> bool {
        self.violations > 0
    }

    pub fn worst_margin(&self) -> f64 {
        self.margin_boundary.min(self.margin_gamma0).min(self.margin_improved.unwrap_or(f64::INFINITY))
    }
}

/// Checks the three lower bounds at every element quadrature point. The
/// linear bound is applied only when `Γ0` meets the cone orthogonally (or
/// has no boundary).
pub fn u_distance_bounds(u: &FemField, spec: &DomainSpec, r_i: f64) -> Result<DistanceBounds> {
    spec.cone.require_convex()?;
    let partition = boundary_partition(spec);
    let improved = orthogonal_corners(spec);
    let per_element: Vec<(f64, f64, f64, usize, usize)> = (0..u.space.num_elements())
        .into_par_iter()
        .map(|t| {
            let (mut a, mut b, mut c) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
            let (mut count, mut bad) = (0, 0);
            for q in u.space.quadrature(t, None) {
                let minus_u = -u.value_at(t, q.bary);
                let d_all = partition.distance_to_boundary(q.x);
                let d0 = partition.distance_to_gamma0(q.x);
                let ma = minus_u - 0.5 * d_all * d_all;
                let mb = minus_u - 0.5 * d0 * d0;
                let mc = if improved { minus_u - 0.5 * r_i * d0 } else { f64::INFINITY };
                a = a.min(ma);
                b = b.min(mb);
                c = c.min(mc);
                count += 1;
                if ma.min(mb).min(mc) < -FEM_TOLERANCE {
                    bad += 1;
                }
            }
            (a, b, c, count, bad)
        })
        .collect();
    let fold = |f: fn(&(f64, f64, f64, usize, usize)) -> f64| per_element.iter().map(f).fold(f64::INFINITY, f64::min);
    Ok(DistanceBounds {
        margin_boundary: fold(|p| p.0),
        margin_gamma0: fold(|p| p.1),
        margin_improved: improved.then(|| fold(|p| p.2)),
        improved_applies: improved,
        points_checked: per_element.iter().map(|p| p.3).sum(),
        violations: per_element.iter().map(|p| p.4).sum(),
    })
}
