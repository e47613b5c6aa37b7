//! Weighted Poincaré constants `μ_{2,α}` and `η_{2,α}` from discrete
//! Rayleigh quotients, and the constants built from them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::fem::{mass_matrix, weighted_stiffness, FemField, FemSpace};
use crate::geometry::{boundary_partition, BoundaryPartition, Segment, SpanInfo};
use crate::linalg::{lowest_eigenpairs, CsrMatrix, EigenOptions, Triplet};
use crate::mesher::{refine, BoundaryTag, TaggedMesh};
use crate::{Error, Point, Result, DIM};

/// Relative agreement of the last two levels that marks convergence.
pub const CONVERGENCE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Zero-mean scalar fields, weight `δ_∂^α`.
    Mu,
    /// Constrained vector fields, weight `δ_{Γ0}^α`.
    Eta,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Mu => "MU",
            Kind::Eta => "ETA",
        })
    }
}

/// A constant estimated on one or more mesh levels; `value` is the one on
/// the finest level, and the inequality uses `value⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareEstimate {
    pub kind: Kind,
    pub alpha: f64,
    pub value: f64,
    pub level: usize,
    /// `(level, value)` from coarse to fine.
    pub history: Vec<(usize, f64)>,
    pub eigen_iterations: usize,
}

impl PoincareEstimate {
    /// Whether the last two levels agree within [`CONVERGENCE_TOLERANCE`].
    pub fn converged(&self) -> bool {
        match self.history.as_slice() {
            [.., (_, a), (_, b)] => (a - b).abs() <= CONVERGENCE_TOLERANCE * b.abs(),
            _ => false,
        }
    }

    /// Values decrease under refinement, up to [`CONVERGENCE_TOLERANCE`].
    pub fn monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + CONVERGENCE_TOLERANCE))
    }

    /// CSV rows `kind, alpha, level, value, converged_flag`, one per level;
    /// the flag compares each level with the previous one.
    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.history
            .iter()
            .enumerate()
            .map(|(i, &(level, value))| {
                let flag = i > 0 && (self.history[i - 1].1 - value).abs() <= CONVERGENCE_TOLERANCE * value.abs();
                vec![self.kind.to_string(), format!("{}", self.alpha), level.to_string(), format!("{value:.12e}"), flag.to_string()]
            })
            .collect()
    }

    fn merge(mut self, coarser: Option<PoincareEstimate>) -> Self {
        if let Some(c) = coarser {
            let mut history = c.history;
            history.extend(self.history);
            self.history = history;
        }
        self
    }
}

pub const CSV_COLUMNS: [&str; 5] = ["kind", "alpha", "level", "value", "converged_flag"];

fn check_alpha(alpha: f64) -> Result<()> {
    if [0.0, 0.5, 1.0].contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be 0, 1/2 or 1, got {alpha}")))
    }
}

fn mesh_boundary_segments(mesh: &TaggedMesh, tag: Option<BoundaryTag>) -> Vec<Segment> {
    mesh.boundary_edges
        .iter()
        .filter(|e| tag.is_none_or(|t| t == e.tag))
        .map(|e| {
            let (a, b) = (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
            let d = b - a;
            Segment { a, b, normal: Point::new(d.y, -d.x).normalize() }
        })
        .collect()
}

fn distance_to(segments: &[Segment], p: Point) -> f64 {
    segments.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min)
}

/// Distance functions: to the whole boundary and to `Γ0`, from the analytic
/// partition when the mesh knows its domain, else from the mesh edges.
struct Distances {
    partition: Option<BoundaryPartition>,
    all: Vec<Segment>,
    gamma0: Vec<Segment>,
}

impl Distances {
    fn new(mesh: &TaggedMesh) -> Self {
        match &mesh.domain {
            Some(d) => Self { partition: Some(boundary_partition(d)), all: Vec::new(), gamma0: Vec::new() },
            None => Self {
                partition: None,
                all: mesh_boundary_segments(mesh, None),
                gamma0: mesh_boundary_segments(mesh, Some(BoundaryTag::Gamma0)),
            },
        }
    }

    fn boundary(&self, p: Point) -> f64 {
        match &self.partition {
            Some(part) => part.distance_to_boundary(p),
            None => distance_to(&self.all, p),
        }
    }

    fn gamma0(&self, p: Point) -> f64 {
        match &self.partition {
            Some(part) => part.distance_to_gamma0(p),
            None => distance_to(&self.gamma0, p),
        }
    }
}

fn weight_fn(alpha: f64, dist: impl Fn(Point) -> f64 + Sync) -> impl Fn(Point) -> f64 + Sync {
    move |p| if alpha == 0.0 { 1.0 } else { dist(p).powf(2.0 * alpha) }
}

/// `μ_{2,α}` on a single mesh with degree-1 fields.
pub fn mu_estimate(mesh: &Arc<TaggedMesh>, alpha: f64) -> Result<PoincareEstimate> {
    check_alpha(alpha)?;
    let space = FemSpace::new(mesh.clone(), 1, false)?;
    let dist = Distances::new(mesh);
    let k = weighted_stiffness(&space, weight_fn(alpha, |p| dist.boundary(p)));
    let m = mass_matrix(&space);
    let opts = EigenOptions { deflate: vec![vec![1.0; space.num_nodes()]], ..Default::default() };
    let pairs = lowest_eigenpairs(&k, &m, &opts)?;
    let lambda = pairs.values[0];
    if !(lambda > 0.0) {
        return Err(Error::Eigen(format!("non-positive zero-mean eigenvalue {lambda:.3e}")));
    }
    Ok(PoincareEstimate {
        kind: Kind::Mu,
        alpha,
        value: lambda.sqrt(),
        level: mesh.level,
        history: vec![(mesh.level, lambda.sqrt())],
        eigen_iterations: pairs.iterations,
    })
}

/// Per-node admissible directions for the vector problem: the span basis,
/// cut down by `⟨v, ν⟩ = 0` for every `Γ1` edge normal at the node unless
/// `constrained` is false.
fn node_bases(mesh: &TaggedMesh, span: &SpanInfo, constrained: bool) -> Vec<Vec<Point>> {
    let mut normals: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
    if constrained {
        for s in mesh.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Gamma1) {
            let d = mesh.vertices[s.v[1]] - mesh.vertices[s.v[0]];
            let n = Point::new(d.y, -d.x).normalize();
            for v in s.v {
                normals.entry(v).or_default().push(n);
            }
        }
    }
    (0..mesh.num_vertices())
        .map(|v| {
            let mut basis = span.basis.clone();
            for n in normals.get(&v).into_iter().flatten() {
                basis = restrict_orthogonal(&basis, *n);
            }
            basis
        })
        .collect()
}

/// Orthonormal basis of `span(basis) ∩ n^⊥` (planar).
fn restrict_orthogonal(basis: &[Point], n: Point) -> Vec<Point> {
    match basis.len() {
        0 => Vec::new(),
        1 => {
            if basis[0].dot(&n).abs() <= 1e-10 {
                basis.to_vec()
            } else {
                Vec::new()
            }
        }
        _ => vec![Point::new(-n.y, n.x)],
    }
}

fn vector_matrix(scalar: &CsrMatrix, bases: &[Vec<Point>], offsets: &[usize], size: usize) -> CsrMatrix {
    let mut t: Vec<Triplet> = Vec::with_capacity(scalar.nnz() * 2);
    for i in 0..scalar.n {
        for (j, v) in scalar.row(i) {
            for (a, bi) in bases[i].iter().enumerate() {
                for (b, bj) in bases[j].iter().enumerate() {
                    let c = bi.dot(bj);
                    if c != 0.0 {
                        t.push((offsets[i] + a, offsets[j] + b, c * v));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(size, &t)
}

/// Smallest eigenvalue of the constrained vector problem (not its root),
/// optionally without the `Γ1` constraint.
pub fn eta_eigenvalue(mesh: &Arc<TaggedMesh>, span: &SpanInfo, alpha: f64, constrained: bool) -> Result<(f64, usize)> {
    check_alpha(alpha)?;
    if span.k == 0 {
        return Err(Error::InvalidArgument("η needs a nonempty Γ1 (k ≥ 1); use μ".into()));
    }
    let space = FemSpace::new(mesh.clone(), 1, false)?;
    let dist = Distances::new(mesh);
    let ks = weighted_stiffness(&space, weight_fn(alpha, |p| dist.gamma0(p)));
    let ms = mass_matrix(&space);
    let bases = node_bases(mesh, span, constrained);
    let mut offsets = Vec::with_capacity(bases.len());
    let mut size = 0;
    for b in &bases {
        offsets.push(size);
        size += b.len();
    }
    let k = vector_matrix(&ks, &bases, &offsets, size);
    let m = vector_matrix(&ms, &bases, &offsets, size);
    let pairs = lowest_eigenpairs(&k, &m, &EigenOptions::default())?;
    Ok((pairs.values[0], pairs.iterations))
}

/// `η_{2,α}` on a single mesh with degree-1 vector fields.
pub fn eta_estimate(mesh: &Arc<TaggedMesh>, span: &SpanInfo, alpha: f64) -> Result<PoincareEstimate> {
    let (lambda, iterations) = eta_eigenvalue(mesh, span, alpha, true)?;
    if !(lambda > 0.0) {
        return Err(Error::Eigen(format!("constrained eigenvalue {lambda:.3e} is not positive")));
    }
    Ok(PoincareEstimate {
        kind: Kind::Eta,
        alpha,
        value: lambda.sqrt(),
        level: mesh.level,
        history: vec![(mesh.level, lambda.sqrt())],
        eigen_iterations: iterations,
    })
}

/// Runs `estimate` on `mesh` and `levels − 1` successive refinements and
/// keeps the whole history.
pub fn estimate_with_history(
    mesh: &Arc<TaggedMesh>,
    levels: usize,
    estimate: impl Fn(&Arc<TaggedMesh>) -> Result<PoincareEstimate>,
) -> Result<PoincareEstimate> {
    let mut current = mesh.clone();
    let mut out: Option<PoincareEstimate> = None;
    for i in 0..levels.max(1) {
        if i > 0 {
            current = Arc::new(refine(&current));
        }
        let e = estimate(&current)?;
        out = Some(e.merge(out));
    }
    Ok(out.unwrap())
}

/// `Λ_{2,α}(k)`: `μ⁻¹` for `k = 0`, `η⁻¹` for `k = N`, the larger of the
/// two in between.
pub fn lambda_constant(k: usize, mu: Option<f64>, eta: Option<f64>) -> Result<f64> {
    let need = |v: Option<f64>, what: &str| v.ok_or_else(|| Error::MissingInput(format!("{what} is required for k = {k}")));
    match k {
        0 => Ok(1.0 / need(mu, "μ")?),
        k if k == DIM => Ok(1.0 / need(eta, "η")?),
        _ => Ok((1.0 / need(mu, "μ")?).max(1.0 / need(eta, "η")?)),
    }
}

/// Constant of the Lipschitz pseudodistance bound, `(1/(2m))(2NΛ² + 3)`.
pub fn theorem_constant(m: f64, lambda: f64, n: usize) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::NonPositiveFlux(m));
    }
    Ok((2.0 * n as f64 * lambda * lambda + 3.0) / (2.0 * m))
}

/// Both sides of `‖∇h‖ ≤ Λ ‖δ_{Γ0}^α ∇²h‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareCheck {
    pub grad_norm: f64,
    pub weighted_hessian_norm: f64,
    pub lambda: f64,
    /// `Λ‖δ^α∇²h‖ − ‖∇h‖`.
    pub margin: f64,
}

/// Checks the mixed gradient Poincaré inequality for `h = q − u`.
pub fn mixed_gradient_poincare_check(
    h: &FemField,
    span: &SpanInfo,
    mu: Option<f64>,
    eta: Option<f64>,
    alpha: f64,
) -> Result<PoincareCheck> {
    check_alpha(alpha)?;
    let lambda = lambda_constant(span.k, mu, eta)?;
    // free components of ∇h must have zero mean
    let area = h.integrate(|_, _, _| 1.0);
    let mean = span.rotation * Point::new(h.integrate(|_, _, g| g.x), h.integrate(|_, _, g| g.y)) / area;
    let scale = h.integrate(|_, _, g| g.norm()) / area;
    for i in span.k..DIM {
        if mean[i].abs() > 1e-8 * scale.max(1e-12) && mean[i].abs() > 1e-12 {
            return Err(Error::CenterConstraint(mean[i]));
        }
    }
    let dist = Distances::new(&h.space.mesh);
    let grad_norm = h.dirichlet_energy().sqrt();
    let mut parts = Vec::with_capacity(h.space.num_elements());
    for t in 0..h.space.num_elements() {
        let mut acc = 0.0;
        for q in h.space.quadrature(t, None) {
            let w = if alpha == 0.0 { 1.0 } else { dist.gamma0(q.x).powf(2.0 * alpha) };
            acc += q.weight * w * h.hessian_at(t, q.bary)?.norm_squared();
        }
        parts.push(acc);
    }
    let weighted_hessian_norm = crate::numeric::pairwise_sum(&parts).sqrt();
    Ok(PoincareCheck { grad_norm, weighted_hessian_norm, lambda, margin: lambda * weighted_hessian_norm - grad_norm })
}

/// Exponent triple `(r, p, α)` admissible for the strengthened inequalities:
/// `1 ≤ p ≤ r ≤ Np/(N − p(1−α))` when `p(1−α) < N`, any `r ≥ p` otherwise.
pub fn admissible_exponents(r: f64, p: f64, alpha: f64, n: usize) -> bool {
    if !(1.0 <= p && p <= r && (0.0..=1.0).contains(&alpha)) {
        return false;
    }
    let n = n as f64;
    let d = n - p * (1.0 - alpha);
    if d > 0.0 { r <= n * p / d } else { r.is_finite() }
}

#[cfg(test)]
mod tests;
