use nalgebra::{Matrix2, Matrix2xX};

use super::domain::DomainSpec;
use crate::Point;

/// Straight boundary piece with its exterior unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub normal: Point,
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    /// Closest point of the segment to `p`.
    pub fn closest_point(&self, p: Point) -> Point {
        let d = self.b - self.a;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return self.a;
        }
        let s = ((p - self.a).dot(&d) / len2).clamp(0.0, 1.0);
        self.a + d * s
    }

    pub fn distance(&self, p: Point) -> f64 {
        (p - self.closest_point(p)).norm()
    }
}

/// Boundary of `Σ∩Ω` split into the radial graph `Γ0` (as a polyline) and
/// the straight cone pieces `Γ1`.
#[derive(Debug, Clone)]
pub struct BoundaryPartition {
    pub spec: DomainSpec,
    /// Polyline vertices of `Γ0`, ordered by increasing angle.
    pub gamma0_points: Vec<Point>,
    /// Local angles of `gamma0_points`.
    pub gamma0_angles: Vec<f64>,
    pub gamma0: Vec<Segment>,
    pub gamma1: Vec<Segment>,
    /// `∂Γ0`: the points where `Γ0` meets the cone boundary.
    pub corners: Vec<Point>,
}

pub fn boundary_partition(spec: &DomainSpec) -> BoundaryPartition {
    let n = spec.samples;
    let beta = spec.opening();
    let gamma0_angles: Vec<f64> = (0..=n).map(|i| beta * i as f64 / n as f64).collect();
    let mut gamma0_points: Vec<Point> = gamma0_angles.iter().map(|&t| spec.gamma0_point(t)).collect();
    if spec.cone.is_full_plane() {
        gamma0_points[n] = gamma0_points[0];
    }
    let gamma0 = gamma0_points
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            Segment { a: w[0], b: w[1], normal: Point::new(d.y, -d.x).normalize() }
        })
        .collect();

    let mut gamma1 = Vec::new();
    let mut corners = Vec::new();
    if !spec.cone.is_full_plane() {
        let origin = Point::zeros();
        let p0 = gamma0_points[0];
        let pb = gamma0_points[n];
        let e0 = spec.ray(0.0);
        let eb = spec.ray(beta);
        let n0 = Point::new(e0.y, -e0.x);
        let nb = Point::new(-eb.y, eb.x);
        if (beta - std::f64::consts::PI).abs() < 1e-12 {
            gamma1.push(Segment { a: pb, b: p0, normal: n0 });
        } else {
            gamma1.push(Segment { a: origin, b: p0, normal: n0 });
            gamma1.push(Segment { a: pb, b: origin, normal: nb });
        }
        corners.push(p0);
        corners.push(pb);
    }
    BoundaryPartition { spec: spec.clone(), gamma0_points, gamma0_angles, gamma0, gamma1, corners }
}

impl BoundaryPartition {
    pub fn gamma0_length(&self) -> f64 {
        self.gamma0.iter().map(Segment::length).sum()
    }

    /// Distance from `p` to the `Γ0` polyline.
    pub fn distance_to_gamma0(&self, p: Point) -> f64 {
        self.gamma0.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the whole boundary `Γ0 ∪ Γ1`.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.gamma1
            .iter()
            .map(|s| s.distance(p))
            .fold(self.distance_to_gamma0(p), f64::min)
    }
}

/// Dimension and orthonormal basis of `span{ν(x) : x ∈ Γ1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanInfo {
    pub k: usize,
    pub basis: Vec<Point>,
    /// Orthogonal matrix whose first `k` rows span the normal space.
    pub rotation: Matrix2<f64>,
}

impl SpanInfo {
    pub fn empty() -> Self {
        Self { k: 0, basis: Vec::new(), rotation: Matrix2::identity() }
    }

    /// Rows `k..N` of the rotation: directions orthogonal to every `Γ1` normal.
    pub fn free_directions(&self) -> Vec<Point> {
        (self.k..2).map(|i| self.rotation.row(i).transpose()).collect()
    }
}

const RANK_TOL: f64 = 1e-10;

pub fn normal_span(partition: &BoundaryPartition) -> SpanInfo {
    if partition.gamma1.is_empty() {
        return SpanInfo::empty();
    }
    let cols: Vec<Point> = partition.gamma1.iter().map(|s| s.normal).collect();
    let m = Matrix2xX::from_columns(&cols);
    let svd = m.svd(true, false);
    let u = svd.u.expect("svd requested U");
    let s_max = svd.singular_values.max();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let k = order.iter().filter(|&&i| svd.singular_values[i] > RANK_TOL * s_max).count();
    match k {
        0 => SpanInfo::empty(),
        1 => {
            let mut b = u.column(order[0]).into_owned();
            let lead = if b.x.abs() >= b.y.abs() { b.x } else { b.y };
            if lead < 0.0 {
                b = -b;
            }
            let c = Point::new(-b.y, b.x);
            SpanInfo { k: 1, basis: vec![b], rotation: Matrix2::new(b.x, b.y, c.x, c.y) }
        }
        _ => SpanInfo {
            k: 2,
            basis: vec![Point::x(), Point::y()],
            rotation: Matrix2::identity(),
        },
    }
}
