//! Radius functions `r(t)` describing `Γ0 = {r(t) (cos t, sin t)}`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// A smooth positive function of the polar angle with first and second
/// derivatives available in closed form.
#[derive(Clone)]
pub enum RadiusFn {
    /// `r(t) = c`
    Constant(f64),
    /// `r(t) = a0 + Σ a_m cos(m t)`
    Fourier { a0: f64, modes: Vec<(u32, f64)> },
    /// Cubic spline through `(t, r)` pairs.
    Table(Arc<CubicSpline>),
    /// Polar graph of the circle `|x − center| = radius` seen from the origin.
    /// Requires the origin to lie inside the closed disk.
    OffsetCircle { center: [f64; 2], radius: f64 },
    /// `base(t) · (1 + eps · cos(mode · t))`
    Modulated { base: Arc<RadiusFn>, eps: f64, mode: u32 },
}

impl fmt::Debug for RadiusFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusFn::Constant(c) => write!(f, "constant {c}"),
            RadiusFn::Fourier { a0, modes } => {
                write!(f, "fourier {a0}")?;
                for (m, a) in modes {
                    write!(f, " [{m},{a}]")?;
                }
                Ok(())
            }
            RadiusFn::Table(s) => write!(f, "table ({} knots)", s.knots.len()),
            RadiusFn::OffsetCircle { center, radius } => {
                write!(f, "circle {} {} {}", center[0], center[1], radius)
            }
            RadiusFn::Modulated { base, eps, mode } => {
                write!(f, "({base:?}) * (1 + {eps} cos {mode}t)")
            }
        }
    }
}

impl RadiusFn {
    pub fn constant(c: f64) -> Self {
        RadiusFn::Constant(c)
    }

    pub fn fourier(a0: f64, modes: impl Into<Vec<(u32, f64)>>) -> Self {
        RadiusFn::Fourier { a0, modes: modes.into() }
    }

    pub fn offset_circle(center: [f64; 2], radius: f64) -> Self {
        RadiusFn::OffsetCircle { center, radius }
    }

    pub fn modulated(base: RadiusFn, eps: f64, mode: u32) -> Self {
        RadiusFn::Modulated { base: Arc::new(base), eps, mode }
    }

    /// Spline through `(t, r)` pairs. With `periodic`, the first and last
    /// knots must carry the same radius and be `2π` apart.
    pub fn table(points: &[(f64, f64)], periodic: bool) -> Result<Self> {
        Ok(RadiusFn::Table(Arc::new(CubicSpline::new(points, periodic)?)))
    }

    /// Returns `(r, r', r'')` at angle `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            RadiusFn::Constant(c) => (*c, 0.0, 0.0),
            RadiusFn::Fourier { a0, modes } => {
                let mut r = *a0;
                let mut d1 = 0.0;
                let mut d2 = 0.0;
                for &(m, a) in modes {
                    let m = m as f64;
                    let (s, c) = (m * t).sin_cos();
                    r += a * c;
                    d1 -= a * m * s;
                    d2 -= a * m * m * c;
                }
                (r, d1, d2)
            }
            RadiusFn::Table(spline) => spline.eval(t),
            RadiusFn::OffsetCircle { center, radius } => {
                let (s, c) = t.sin_cos();
                let p = center[0] * c + center[1] * s;
                let dp = -center[0] * s + center[1] * c;
                let ddp = -p;
                let disc = radius * radius - center[0] * center[0] - center[1] * center[1] + p * p;
                let q = disc.max(0.0).sqrt();
                let r = p + q;
                if q == 0.0 {
                    return (r, dp, ddp);
                }
                let d1 = dp + p * dp / q;
                let d2 = ddp + (dp * dp + p * ddp) / q - p * p * dp * dp / (q * q * q);
                (r, d1, d2)
            }
            RadiusFn::Modulated { base, eps, mode } => {
                let (b, b1, b2) = base.eval(t);
                let m = *mode as f64;
                let (s, c) = (m * t).sin_cos();
                let g = 1.0 + eps * c;
                let g1 = -eps * m * s;
                let g2 = -eps * m * m * c;
                (b * g, b1 * g + b * g1, b2 * g + 2.0 * b1 * g1 + b * g2)
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Signed curvature of the polar graph (positive where the enclosed
    /// region is locally convex).
    pub fn curvature(&self, t: f64) -> f64 {
        let (r, d1, d2) = self.eval(t);
        (r * r + 2.0 * d1 * d1 - r * d2) / (r * r + d1 * d1).powf(1.5)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, RadiusFn::Constant(_))
            || matches!(self, RadiusFn::Fourier { modes, .. } if modes.iter().all(|m| m.1 == 0.0))
    }
}

/// Cubic spline in `t` with natural or periodic end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
    periodic: bool,
}

impl CubicSpline {
    pub fn new(points: &[(f64, f64)], periodic: bool) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidDomain("radius table needs at least 3 points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidDomain(format!(
                    "radius table angles must be strictly increasing (t = {} then {}); \
                     the boundary would not be a radial graph",
                    w[0].0, w[1].0
                )));
            }
        }
        let knots: Vec<f64> = points.iter().map(|p| p.0).collect();
        let values: Vec<f64> = points.iter().map(|p| p.1).collect();
        let n = knots.len();
        if periodic {
            let span = knots[n - 1] - knots[0];
            if (span - TAU).abs() > 1e-9 || (values[n - 1] - values[0]).abs() > 1e-12 {
                return Err(Error::InvalidDomain(
                    "periodic radius table must span 2π with matching end values".into(),
                ));
            }
        }
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let moments = if periodic {
            // unknowns M_0..M_{n-2}, M_{n-1} = M_0
            let m = n - 1;
            let mut a = DMatrix::<f64>::zeros(m, m);
            let mut b = DVector::<f64>::zeros(m);
            for i in 0..m {
                let hp = h[(i + m - 1) % m];
                let hn = h[i];
                let yp = values[(i + m - 1) % m];
                let yn = values[i + 1];
                a[(i, (i + m - 1) % m)] += hp / 6.0;
                a[(i, i)] += (hp + hn) / 3.0;
                a[(i, (i + 1) % m)] += hn / 6.0;
                b[i] = (yn - values[i]) / hn - (values[i] - yp) / hp;
            }
            let sol = a
                .lu()
                .solve(&b)
                .ok_or_else(|| Error::InvalidDomain("singular periodic spline system".into()))?;
            let mut out: Vec<f64> = sol.iter().copied().collect();
            out.push(out[0]);
            out
        } else {
            // natural: M_0 = M_{n-1} = 0; Thomas algorithm on the interior
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            let mut sub = vec![0.0; m];
            let mut sup = vec![0.0; m];
            for i in 0..m {
                let k = i + 1;
                sub[i] = h[k - 1] / 6.0;
                diag[i] = (h[k - 1] + h[k]) / 3.0;
                sup[i] = h[k] / 6.0;
                rhs[i] = (values[k + 1] - values[k]) / h[k] - (values[k] - values[k - 1]) / h[k - 1];
            }
            for i in 1..m {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut inner = vec![0.0; m];
            for i in (0..m).rev() {
                let next = if i + 1 < m { inner[i + 1] } else { 0.0 };
                inner[i] = (rhs[i] - sup[i] * next) / diag[i];
            }
            let mut out = vec![0.0; n];
            out[1..n - 1].copy_from_slice(&inner);
            out
        };
        Ok(Self { knots, values, moments, periodic })
    }

    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.knots.len();
        let (t0, tn) = (self.knots[0], self.knots[n - 1]);
        let t = if self.periodic {
            t0 + (t - t0).rem_euclid(tn - t0)
        } else {
            t.clamp(t0, tn)
        };
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - t) / h;
        let b = (t - self.knots[i]) / h;
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let r = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2 = a * m0 + b * m1;
        (r, d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: &RadiusFn, t: f64) {
        let h = 1e-5;
        let (_, d1, d2) = f.eval(t);
        let fd1 = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
        let fd2 = (f.value(t + h) - 2.0 * f.value(t) + f.value(t - h)) / (h * h);
        assert!((d1 - fd1).abs() < 1e-7, "{f:?} d1 {d1} vs {fd1}");
        assert!((d2 - fd2).abs() < 1e-3, "{f:?} d2 {d2} vs {fd2}");
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let fns = [
            RadiusFn::fourier(1.0, vec![(3, 0.05), (5, -0.01)]),
            RadiusFn::offset_circle([0.3, 0.0], 1.0),
            RadiusFn::offset_circle([0.1, -0.2], 0.9),
            RadiusFn::modulated(RadiusFn::fourier(1.0, vec![(2, 0.1)]), 0.04, 4),
        ];
        for f in &fns {
            for t in [0.1, 0.7, 1.9, 3.0, 5.5] {
                fd_check(f, t);
            }
        }
    }

    #[test]
    fn offset_circle_points_lie_on_circle() {
        let f = RadiusFn::offset_circle([0.3, 0.0], 1.0);
        for i in 0..50 {
            let t = i as f64 * 0.06;
            let r = f.value(t);
            let (x, y) = (r * t.cos() - 0.3, r * t.sin());
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_radius_has_unit_curvature_over_radius() {
        let f = RadiusFn::constant(2.0);
        assert!((f.curvature(0.3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spline_reproduces_cubic_inside_and_knots() {
        let pts: Vec<(f64, f64)> = (0..=8).map(|i| (i as f64 * 0.25, 1.0 + 0.1 * (i as f64 * 0.25).sin())).collect();
        let s = CubicSpline::new(&pts, false).unwrap();
        for &(t, r) in &pts {
            assert!((s.eval(t).0 - r).abs() < 1e-14);
        }
        assert!((s.eval(1.1).0 - (1.0 + 0.1 * 1.1f64.sin())).abs() < 1e-4);
    }

    #[test]
    fn periodic_spline_is_smooth_across_seam() {
        let pts: Vec<(f64, f64)> = (0..=16)
            .map(|i| {
                let t = i as f64 * TAU / 16.0;
                (t, 1.0 + 0.05 * (3.0 * t).cos())
            })
            .collect();
        let s = CubicSpline::new(&pts, true).unwrap();
        let a = s.eval(TAU - 1e-9);
        let b = s.eval(1e-9);
        assert!((a.0 - b.0).abs() < 1e-8);
        assert!((a.1 - b.1).abs() < 1e-6);
    }

    #[test]
    fn non_monotone_table_rejected() {
        let pts = [(0.0, 1.0), (1.0, 1.0), (0.5, 1.0), (3.0, 1.0)];
        assert!(RadiusFn::table(&pts, false).is_err());
    }
}
