use std::f64::consts::FRAC_PI_2;

use super::domain::DomainSpec;
use super::partition::BoundaryPartition;
use crate::{Error, Point, Result};

/// `R = N |Σ∩Ω| / |Γ0|`.
pub fn serrin_radius(area: f64, gamma0_length: f64, dim: usize) -> Result<f64> {
    if !(gamma0_length > 0.0) {
        return Err(Error::InvalidArgument(format!("Γ0 length must be positive, got {gamma0_length}")));
    }
    if !(area > 0.0) {
        return Err(Error::InvalidArgument(format!("area must be positive, got {area}")));
    }
    Ok(dim as f64 * area / gamma0_length)
}

/// `(ρe, ρi)`: extreme distances from `z` to the closure of `Γ0`.
///
/// The sampled polyline vertices bracket each local extremum, which is then
/// located on the analytic curve by golden-section search.
pub fn rho_extremes(partition: &BoundaryPartition, z: Point) -> (f64, f64) {
    let spec = &partition.spec;
    let dist = |t: f64| (spec.gamma0_point(t) - z).norm();
    let angles = &partition.gamma0_angles;
    let values: Vec<f64> = partition.gamma0_points.iter().map(|p| (p - z).norm()).collect();
    let n = values.len();
    let mut rho_e = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rho_i = values.iter().copied().fold(f64::INFINITY, f64::min);
    let periodic = spec.cone.is_full_plane();
    // closed curves repeat the first point at the end
    let last = if periodic { n - 1 } else { n };
    for i in 0..last {
        let (prev, a) = match i {
            0 if periodic => (n - 2, angles[n - 2] - std::f64::consts::TAU),
            0 => (0, angles[0]),
            _ => (i - 1, angles[i - 1]),
        };
        let (next, b) = if i + 1 < n { (i + 1, angles[i + 1]) } else { (i, angles[i]) };
        let v = values[i];
        if v >= values[prev] && v >= values[next] {
            rho_e = rho_e.max(golden(&dist, a, b, true));
        }
        if v <= values[prev] && v <= values[next] {
            rho_i = rho_i.min(golden(&dist, a, b, false));
        }
    }
    (rho_e, rho_i)
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |t: f64| sign * f(t);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = g(d);
        }
    }
    let best = [g(a), g(b), fc, fd].into_iter().fold(f64::INFINITY, f64::min);
    sign * best
}

/// Sampled radius of the uniform interior touching ball relative to the cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorSphere {
    pub radius: f64,
    /// Set when the sampled boundary admits no touching ball (cusp or
    /// degenerate geometry); `radius` is then zero.
    pub degenerate: bool,
}

/// Lower bound (up to sampling) on the largest `ρ` such that at every point
/// of `Γ0` an interior ball of radius `ρ` touches `Γ0` only there and has
/// its center in the closed domain.
pub fn interior_sphere_radius(spec: &DomainSpec) -> InteriorSphere {
    let samples = boundary_samples(spec, 2);
    let mut best = f64::INFINITY;
    for (i, &(x, nu)) in samples.iter().enumerate() {
        let inward = -nu;
        let mut rho = chord_bound(&samples, i, x, inward);
        rho = rho.min(center_limit(spec, x, inward, rho));
        best = best.min(rho);
    }
    if !(best > 1e-12) || !best.is_finite() {
        return InteriorSphere { radius: 0.0, degenerate: true };
    }
    InteriorSphere { radius: best, degenerate: false }
}

/// Sampled radius of the uniform exterior touching ball. Convex boundaries
/// admit arbitrarily large exterior balls and return `f64::INFINITY`.
pub fn exterior_sphere_radius(spec: &DomainSpec) -> f64 {
    let samples = boundary_samples(spec, 2);
    samples
        .iter()
        .enumerate()
        .map(|(i, &(x, nu))| chord_bound(&samples, i, x, nu))
        .fold(f64::INFINITY, f64::min)
}

fn boundary_samples(spec: &DomainSpec, refine: usize) -> Vec<(Point, Point)> {
    let mut out: Vec<(Point, Point)> =
        spec.sample_angles(refine).map(|t| (spec.gamma0_point(t), spec.gamma0_normal(t))).collect();
    if spec.cone.is_full_plane() {
        out.pop();
    }
    out
}

/// Largest radius of a ball tangent at `x` on the side `dir` whose closure
/// avoids every other sample: `|y − x|² ≥ 2ρ⟨y − x, dir⟩`.
fn chord_bound(samples: &[(Point, Point)], i: usize, x: Point, dir: Point) -> f64 {
    samples
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .filter_map(|(_, &(y, _))| {
            let d = y - x;
            let along = d.dot(&dir);
            (along > 1e-14 * d.norm()).then(|| d.norm_squared() / (2.0 * along))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest `ρ ≤ upper` for which `x + ρ dir` stays in the closed domain.
fn center_limit(spec: &DomainSpec, x: Point, dir: Point, upper: f64) -> f64 {
    let upper = if upper.is_finite() { upper } else { 4.0 * spec.max_radius() };
    let inside = |rho: f64| spec.contains(x + dir * rho, 1e-12);
    if inside(upper) {
        return upper;
    }
    let steps = 64;
    let mut lo = 0.0;
    let mut hi = upper;
    for s in 1..=steps {
        let rho = upper * s as f64 / steps as f64;
        if !inside(rho) {
            hi = rho;
            break;
        }
        lo = rho;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Euclidean diameter of the closed domain, from boundary samples.
pub fn diameter(partition: &BoundaryPartition) -> f64 {
    let mut pts = partition.gamma0_points.clone();
    if !partition.gamma1.is_empty() {
        pts.push(Point::zeros());
    }
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

/// Interior angles of the domain at the points of `∂Γ0`, in radians.
pub fn corner_angles(spec: &DomainSpec) -> Vec<f64> {
    if spec.cone.is_full_plane() {
        return Vec::new();
    }
    let beta = spec.opening();
    let angle_at = |t: f64, toward_curve: f64| {
        let (r, d1, _) = spec.radius.eval(t);
        let (s, c) = t.sin_cos();
        // tangent of Γ0 pointing into the curve, in the local frame
        let tangent = Point::new(d1 * c - r * s, d1 * s + r * c).normalize() * toward_curve;
        let to_vertex = -Point::new(c, s);
        tangent.dot(&to_vertex).clamp(-1.0, 1.0).acos()
    };
    vec![angle_at(0.0, 1.0), angle_at(beta, -1.0)]
}

/// Whether `Γ0` meets the cone boundary orthogonally (vacuously true on the
/// full plane).
pub fn orthogonal_corners(spec: &DomainSpec) -> bool {
    corner_angles(spec).iter().all(|a| (a - FRAC_PI_2).abs() < 1e-6)
}

/// Crude `(θ, ã)` estimate for the uniform interior cone condition: half the
/// smallest interior angle (capped at π/2) and half the smallest feature
/// length.
pub fn cone_condition_estimate(spec: &DomainSpec, partition: &BoundaryPartition) -> (f64, f64) {
    let mut min_angle = corner_angles(spec).into_iter().fold(std::f64::consts::PI, f64::min);
    if !spec.cone.is_full_plane() {
        min_angle = min_angle.min(spec.opening());
    }
    let theta = (0.5 * min_angle).min(FRAC_PI_2);
    let feature = partition.gamma1.iter().map(|s| s.length()).fold(spec.min_radius(), f64::min);
    (theta, 0.5 * feature)
}

/// Geometric summary of a domain relative to a chosen center.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub area: f64,
    pub gamma0_length: f64,
    pub diameter: f64,
    pub rho_e: f64,
    pub rho_i: f64,
    pub r_i_estimate: f64,
    pub r_e_estimate: f64,
    pub theta: f64,
    pub a_tilde: f64,
    pub orthogonal_corners: bool,
}

/// Builds the report. `cone_params` overrides the `(θ, ã)` estimator.
pub fn geometry_report(
    partition: &BoundaryPartition,
    z: Point,
    cone_params: Option<(f64, f64)>,
) -> GeometryReport {
    let spec = &partition.spec;
    let (rho_e, rho_i) = rho_extremes(partition, z);
    let (theta, a_tilde) = cone_params.unwrap_or_else(|| cone_condition_estimate(spec, partition));
    GeometryReport {
        area: spec.area(),
        gamma0_length: spec.gamma0_length(),
        diameter: diameter(partition),
        rho_e,
        rho_i,
        r_i_estimate: interior_sphere_radius(spec).radius,
        r_e_estimate: exterior_sphere_radius(spec),
        theta,
        a_tilde,
        orthogonal_corners: orthogonal_corners(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_partition, make_sector_domain, RadiusFn};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn serrin_radius_examples() {
        assert!((serrin_radius(PI / 4.0, PI / 2.0, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((serrin_radius(PI, TAU, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(serrin_radius(1.0, 0.0, 2).is_err());
    }

    #[test]
    fn serrin_radius_of_perturbed_disk_matches_quadrature() {
        // oracle: trapezoid rule on the periodic integrands (spectrally accurate)
        let eps = 0.05;
        let n = 4000;
        let (mut area, mut len) = (0.0, 0.0);
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            let r = 1.0 + eps * (3.0 * t).cos();
            let dr = -3.0 * eps * (3.0 * t).sin();
            area += 0.5 * r * r;
            len += (r * r + dr * dr).sqrt();
        }
        area *= TAU / n as f64;
        len *= TAU / n as f64;
        let spec = make_sector_domain(TAU, RadiusFn::fourier(1.0, vec![(3, eps)]), 512).unwrap();
        let r = serrin_radius(spec.area(), spec.gamma0_length(), 2).unwrap();
        assert!((r - 2.0 * area / len).abs() < 1e-11);
    }

    #[test]
    fn serrin_radius_is_homogeneous() {
        for lambda in [0.5, 3.0] {
            let a = make_sector_domain(1.2, RadiusFn::fourier(1.0, vec![(2, 0.1)]), 256).unwrap();
            let b = make_sector_domain(1.2, RadiusFn::fourier(lambda, vec![(2, 0.1 * lambda)]), 256).unwrap();
            let ra = serrin_radius(a.area(), a.gamma0_length(), 2).unwrap();
            let rb = serrin_radius(b.area(), b.gamma0_length(), 2).unwrap();
            assert!((rb - lambda * ra).abs() < 1e-11);
        }
    }

    #[test]
    fn rho_extremes_examples() {
        let q = make_sector_domain(PI / 2.0, RadiusFn::constant(1.0), 64).unwrap();
        let (e, i) = rho_extremes(&boundary_partition(&q), Point::zeros());
        assert!((e - 1.0).abs() < 1e-15 && (i - 1.0).abs() < 1e-15);

        let eps = 0.05;
        let d = make_sector_domain(TAU, RadiusFn::fourier(1.0, vec![(3, eps)]), 64).unwrap();
        let (e, i) = rho_extremes(&boundary_partition(&d), Point::zeros());
        assert!((e - (1.0 + eps)).abs() < 1e-10);
        assert!((i - (1.0 - eps)).abs() < 1e-10);

        let a = 0.3;
        let h = make_sector_domain(PI, RadiusFn::offset_circle([a, 0.0], 1.0), 128).unwrap();
        let (e, i) = rho_extremes(&boundary_partition(&h), Point::new(a, 0.0));
        assert!((e - 1.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_gap_vanishes_for_constant_radius_sectors() {
        for beta in [0.5, 1.0, PI, TAU] {
            let s = make_sector_domain(beta, RadiusFn::constant(1.7), 37).unwrap().rotated(0.2);
            let (e, i) = rho_extremes(&boundary_partition(&s), Point::zeros());
            assert!((e - i).abs() < 1e-8);
        }
    }

    /// Oracle: brute-force search over centers along the inward normal.
    fn brute_force_touching_radius(spec: &DomainSpec, dense: usize) -> f64 {
        let pts: Vec<Point> = (0..dense).map(|i| spec.gamma0_point(spec.opening() * i as f64 / (dense - 1) as f64)).collect();
        let mut best = f64::INFINITY;
        for i in (0..dense).step_by(dense / 64) {
            let t = spec.opening() * i as f64 / (dense - 1) as f64;
            let x = spec.gamma0_point(t);
            let n = -spec.gamma0_normal(t);
            let mut lo = 0.0;
            let mut rho = 1e-3;
            while rho < 3.0 {
                let c = x + n * rho;
                let ok = spec.contains(c, 1e-12)
                    && pts.iter().all(|y| (y - x).norm() < 1e-9 || (y - c).norm() >= rho - 1e-12);
                if !ok {
                    break;
                }
                lo = rho;
                rho += 1e-3;
            }
            best = best.min(lo);
        }
        best
    }

    #[test]
    fn interior_sphere_quarter_and_full_disk() {
        let q = make_sector_domain(PI / 2.0, RadiusFn::constant(1.0), 128).unwrap();
        let r = interior_sphere_radius(&q);
        assert!(!r.degenerate);
        assert!((r.radius - 1.0).abs() < 1e-9);
        let oracle = brute_force_touching_radius(&q, 2000);
        assert!((r.radius - oracle).abs() < 5e-3);

        let d = make_sector_domain(TAU, RadiusFn::constant(1.0), 128).unwrap();
        assert!((interior_sphere_radius(&d).radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn interior_sphere_of_perturbed_disk_matches_curvature() {
        let spec = make_sector_domain(TAU, RadiusFn::fourier(1.0, vec![(3, 0.05)]), 512).unwrap();
        let oracle = (0..20000)
            .map(|i| 1.0 / spec.radius.curvature(TAU * i as f64 / 20000.0))
            .fold(f64::INFINITY, f64::min);
        let r = interior_sphere_radius(&spec).radius;
        assert!((r - oracle).abs() < 0.01 * oracle, "{r} vs {oracle}");
        assert!(exterior_sphere_radius(&spec).is_infinite());
    }

    #[test]
    fn corners_of_quarter_disk_are_orthogonal() {
        let q = make_sector_domain(PI / 2.0, RadiusFn::fourier(1.0, vec![(4, 0.05)]), 64).unwrap();
        assert!(orthogonal_corners(&q));
        let tilted = make_sector_domain(PI / 2.0, RadiusFn::fourier(1.0, vec![(1, 0.2)]), 64).unwrap();
        assert!(!orthogonal_corners(&tilted));
    }

    #[test]
    fn geometry_report_invariants() {
        let s = make_sector_domain(PI / 2.0, RadiusFn::fourier(1.0, vec![(4, 0.05)]), 256).unwrap();
        let p = boundary_partition(&s);
        let g = geometry_report(&p, Point::zeros(), None);
        assert!(g.rho_i <= g.rho_e && g.rho_i > 0.0);
        assert!(g.r_i_estimate > 0.0 && g.r_i_estimate <= g.rho_e);
        assert!((g.diameter - 2f64.sqrt() * 1.0).abs() < 0.1);
        assert!(g.theta > 0.0 && g.theta <= FRAC_PI_2);
    }
}
