use std::f64::consts::{PI, TAU};

use nalgebra::Rotation2;

use super::radius::RadiusFn;
use crate::numeric::adaptive_simpson;
use crate::{Error, Point, Result};

/// Planar cone `{(r cos t, r sin t) : 0 < t < opening, r > 0}`, rotated by
/// `orientation`. An opening of `2π` encodes the whole plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone2D {
    opening: f64,
    orientation: f64,
}

impl Cone2D {
    pub fn new(opening: f64) -> Result<Self> {
        if !(opening > 0.0) || opening > TAU + 1e-12 {
            return Err(Error::InvalidDomain(format!(
                "cone opening must lie in (0, 2π], got {opening}"
            )));
        }
        Ok(Self { opening: opening.min(TAU), orientation: 0.0 })
    }

    pub fn full_plane() -> Self {
        Self { opening: TAU, orientation: 0.0 }
    }

    pub fn opening(&self) -> f64 {
        self.opening
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn is_full_plane(&self) -> bool {
        (self.opening - TAU).abs() < 1e-12
    }

    pub fn is_convex(&self) -> bool {
        self.opening <= PI + 1e-12 || self.is_full_plane()
    }

    pub fn require_convex(&self) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(Error::NonConvexCone(self.opening))
        }
    }
}

/// The bounded domain `Σ∩Ω` given as the region under a radial graph
/// over the cone's angular interval.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub cone: Cone2D,
    pub radius: RadiusFn,
    pub samples: usize,
}

/// Validated constructor for a sector-shaped domain.
pub fn make_sector_domain(opening: f64, radius: RadiusFn, samples: usize) -> Result<DomainSpec> {
    DomainSpec::new(Cone2D::new(opening)?, radius, samples)
}

impl DomainSpec {
    pub fn new(cone: Cone2D, radius: RadiusFn, samples: usize) -> Result<Self> {
        if samples < 8 {
            return Err(Error::InvalidDomain(format!("sample count {samples} is below 8")));
        }
        let spec = Self { cone, radius, samples };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if let RadiusFn::OffsetCircle { center, radius } = &self.radius {
            if center[0].hypot(center[1]) >= *radius {
                return Err(Error::InvalidDomain(
                    "offset circle must contain the cone vertex in its interior".into(),
                ));
            }
        }
        let beta = self.cone.opening;
        let dense = 8 * self.samples;
        let mut r_max: f64 = 0.0;
        for i in 0..=dense {
            let t = beta * i as f64 / dense as f64;
            let (r, d1, d2) = self.radius.eval(t);
            if !r.is_finite() || !d1.is_finite() || !d2.is_finite() {
                return Err(Error::InvalidDomain(format!("radius function not finite at t = {t}")));
            }
            if r <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "non-positive radius {r} at t = {t}; boundary is not a star-shaped radial graph"
                )));
            }
            r_max = r_max.max(r);
        }
        if self.cone.is_full_plane() {
            let (a, a1, _) = self.radius.eval(0.0);
            let (b, b1, _) = self.radius.eval(TAU);
            if (a - b).abs() > 1e-9 * r_max || (a1 - b1).abs() > 1e-6 * r_max {
                return Err(Error::InvalidDomain(
                    "full-plane domain needs a 2π-periodic C¹ radius function".into(),
                ));
            }
        }
        Ok(())
    }

    /// Same domain rigidly rotated about the cone vertex.
    pub fn rotated(&self, angle: f64) -> Self {
        let mut out = self.clone();
        out.cone.orientation += angle;
        out
    }

    pub fn opening(&self) -> f64 {
        self.cone.opening
    }

    fn rotation(&self) -> Rotation2<f64> {
        Rotation2::new(self.cone.orientation)
    }

    pub fn to_global(&self, local: Point) -> Point {
        self.rotation() * local
    }

    pub fn to_local(&self, global: Point) -> Point {
        self.rotation().inverse() * global
    }

    /// Global coordinates of the `Γ0` point at local angle `t`.
    pub fn gamma0_point(&self, t: f64) -> Point {
        let r = self.radius.value(t);
        self.to_global(Point::new(r * t.cos(), r * t.sin()))
    }

    /// Exterior unit normal to `Γ0` at local angle `t` (global frame).
    pub fn gamma0_normal(&self, t: f64) -> Point {
        let (r, d1, _) = self.radius.eval(t);
        let (s, c) = t.sin_cos();
        let tangent = Point::new(d1 * c - r * s, d1 * s + r * c);
        self.to_global(Point::new(tangent.y, -tangent.x).normalize())
    }

    /// Unit direction of the cone ray at local angle `t` (global frame).
    pub fn ray(&self, t: f64) -> Point {
        self.to_global(Point::new(t.cos(), t.sin()))
    }

    /// Local polar angle of a global point, mapped to `[0, opening]` for
    /// sectors (clamped to the nearer side when outside) or `[0, 2π)` for
    /// the full plane.
    pub fn local_angle(&self, p: Point) -> f64 {
        let q = self.to_local(p);
        let mut t = q.y.atan2(q.x);
        if t < 0.0 {
            t += TAU;
        }
        if self.cone.is_full_plane() {
            return t;
        }
        let beta = self.cone.opening;
        if t <= beta {
            t
        } else if t - beta < TAU - t {
            beta
        } else {
            0.0
        }
    }

    /// Radial projection of `p` onto `Γ0`.
    pub fn project_to_gamma0(&self, p: Point) -> Point {
        self.gamma0_point(self.local_angle(p))
    }

    /// Closure membership test with relative tolerance `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let q = self.to_local(p);
        let norm = q.norm();
        if norm <= tol {
            return true;
        }
        let mut t = q.y.atan2(q.x);
        if t < 0.0 {
            t += TAU;
        }
        if !self.cone.is_full_plane() {
            let beta = self.cone.opening;
            let outside_angle = if t <= beta { 0.0 } else { (t - beta).min(TAU - t) };
            if outside_angle * norm > tol {
                return false;
            }
            if t > beta {
                t = if t - beta < TAU - t { beta } else { 0.0 };
            }
        }
        norm <= self.radius.value(t) * (1.0 + tol)
    }

    /// Analytic area `½ ∫ r(t)² dt`.
    pub fn area(&self) -> f64 {
        adaptive_simpson(&|t| 0.5 * self.radius.value(t).powi(2), 0.0, self.opening(), 1e-13)
    }

    /// Analytic length of `Γ0`.
    pub fn gamma0_length(&self) -> f64 {
        self.arc_length(0.0, self.opening())
    }

    pub fn arc_length(&self, a: f64, b: f64) -> f64 {
        adaptive_simpson(
            &|t| {
                let (r, d1, _) = self.radius.eval(t);
                r.hypot(d1)
            },
            a,
            b,
            1e-13,
        )
    }

    pub fn max_radius(&self) -> f64 {
        self.sample_angles(8).map(|t| self.radius.value(t)).fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.sample_angles(8).map(|t| self.radius.value(t)).fold(f64::INFINITY, f64::min)
    }

    /// `refine · samples + 1` equispaced angles covering `[0, opening]`.
    pub fn sample_angles(&self, refine: usize) -> impl Iterator<Item = f64> + '_ {
        let n = self.samples * refine;
        let beta = self.opening();
        (0..=n).map(move |i| beta * i as f64 / n as f64)
    }

    /// Table mapping normalized arc length `σ ∈ [0, 1]` along `Γ0` back to
    /// the angle `t`.
    pub fn arc_length_table(&self, resolution: usize) -> ArcLengthTable {
        let beta = self.opening();
        let n = resolution.max(16);
        let mut angles = Vec::with_capacity(n + 1);
        let mut cumulative = Vec::with_capacity(n + 1);
        angles.push(0.0);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = beta * i as f64 / n as f64;
            let b = beta * (i + 1) as f64 / n as f64;
            acc += self.arc_length(a, b);
            angles.push(b);
            cumulative.push(acc);
        }
        ArcLengthTable { angles, cumulative }
    }
}

/// Inverse arc-length parametrization of `Γ0`.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    angles: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ArcLengthTable {
    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Angle at normalized arc length `sigma ∈ [0, 1]`.
    pub fn angle_at(&self, sigma: f64) -> f64 {
        let target = sigma.clamp(0.0, 1.0) * self.total();
        let i = self.cumulative.partition_point(|&c| c < target).clamp(1, self.cumulative.len() - 1);
        let (c0, c1) = (self.cumulative[i - 1], self.cumulative[i]);
        let w = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.angles[i - 1] + w * (self.angles[i] - self.angles[i - 1])
    }
}
