use nalgebra::Matrix2;

use crate::fem::FemField;
use crate::geometry::{boundary_partition, normal_span, SpanInfo};
use crate::{Error, Point, Result};

/// Center `z` of the comparison ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Center {
    pub z: Point,
    /// Number of components fixed to zero (in the rotated frame).
    pub k: usize,
    pub rotation: Matrix2<f64>,
    /// All components free (mean of `x − ∇u`).
    pub alternative: bool,
}

/// Span of the `Γ1` normals of the analytic domain the field lives on.
pub fn span_of(u: &FemField) -> Result<SpanInfo> {
    let domain = u.space.mesh.domain.as_ref().ok_or_else(|| Error::MissingInput("mesh carries no domain".into()))?;
    Ok(normal_span(&boundary_partition(domain)))
}

fn mean_x_minus_grad(u: &FemField) -> Point {
    let area = u.integrate(|_, _, _| 1.0);
    let zx = u.integrate(|x, _, g| x.x - g.x);
    let zy = u.integrate(|x, _, g| x.y - g.y);
    Point::new(zx, zy) / area
}

/// Components along the span directions are zero; the rest are the domain
/// means of `x_i − ∂_i u` in the rotated frame.
pub fn compute_center(u: &FemField, span: &SpanInfo) -> Center {
    let rot = span.rotation;
    let z = if span.k >= 2 {
        Point::zeros()
    } else {
        let mean = rot * mean_x_minus_grad(u);
        let mut local = Point::zeros();
        for i in span.k..2 {
            local[i] = mean[i];
        }
        rot.transpose() * local
    };
    Center { z, k: span.k, rotation: rot, alternative: false }
}

/// Mean of `x − ∇u` with every component free.
pub fn alternative_center(u: &FemField) -> Center {
    Center { z: mean_x_minus_grad(u), k: 0, rotation: Matrix2::identity(), alternative: true }
}
