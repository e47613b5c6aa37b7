use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::Matrix2;

use super::quadrature::{triangle_rule, TriPoint};
use crate::mesher::{BoundaryTag, TaggedMesh};
use crate::{Error, Point, Result};

/// Reference gradients of the barycentric coordinates, in `(ξ, η)`.
const GRAD_LAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
/// Local vertex pairs of the edge nodes 3, 4, 5.
pub(crate) const EDGE_VERTS: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];
/// Reference coordinates of the local vertices.
const REF_VERTS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Basis values and reference gradients at a barycentric point.
pub(crate) fn basis(degree: usize, l: [f64; 3]) -> (Vec<f64>, Vec<[f64; 2]>) {
    if degree == 1 {
        return (l.to_vec(), GRAD_LAMBDA.to_vec());
    }
    let mut v = Vec::with_capacity(6);
    let mut g = Vec::with_capacity(6);
    for i in 0..3 {
        v.push(l[i] * (2.0 * l[i] - 1.0));
        let s = 4.0 * l[i] - 1.0;
        g.push([s * GRAD_LAMBDA[i][0], s * GRAD_LAMBDA[i][1]]);
    }
    for [a, b] in EDGE_VERTS {
        v.push(4.0 * l[a] * l[b]);
        g.push([
            4.0 * (l[a] * GRAD_LAMBDA[b][0] + l[b] * GRAD_LAMBDA[a][0]),
            4.0 * (l[a] * GRAD_LAMBDA[b][1] + l[b] * GRAD_LAMBDA[a][1]),
        ]);
    }
    (v, g)
}

/// Constant reference Hessians of the quadratic basis.
pub(crate) fn basis_hessians() -> [Matrix2<f64>; 6] {
    let outer = |a: usize, b: usize| {
        let ga = nalgebra::Vector2::from(GRAD_LAMBDA[a]);
        let gb = nalgebra::Vector2::from(GRAD_LAMBDA[b]);
        ga * gb.transpose()
    };
    let mut h = [Matrix2::zeros(); 6];
    for i in 0..3 {
        h[i] = outer(i, i) * 4.0;
    }
    for (e, [a, b]) in EDGE_VERTS.into_iter().enumerate() {
        h[3 + e] = (outer(a, b) + outer(b, a)) * 4.0;
    }
    h
}

/// Quadrature point mapped to an element.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub x: Point,
    /// Physical weight (includes the Jacobian).
    pub weight: f64,
    pub bary: [f64; 3],
}

/// Quadrature point on a boundary edge.
#[derive(Debug, Clone, Copy)]
pub struct EdgePoint {
    pub x: Point,
    /// Arc-length weight.
    pub weight: f64,
    /// Exterior unit normal.
    pub normal: Point,
    pub element: usize,
    pub bary: [f64; 3],
}

/// Lagrange space of degree 1 or 2 on a tagged mesh. Nodes are the mesh
/// vertices followed (degree 2) by one node per edge. With `curved`, the
/// edge node of every `Γ0` edge sits on the analytic boundary and the
/// adjacent element uses the quadratic geometry map.
#[derive(Debug, Clone)]
pub struct FemSpace {
    pub mesh: Arc<TaggedMesh>,
    pub degree: usize,
    pub curved: bool,
    pub nodes: Vec<Point>,
    /// Local-to-global node map; only the first `local_dofs()` entries are
    /// meaningful for degree 1.
    pub elements: Vec<[usize; 6]>,
    pub on_gamma0: Vec<bool>,
    pub on_gamma1: Vec<bool>,
    /// Six geometric nodes per element (vertices then edge points).
    geometry: Vec<[Point; 6]>,
    is_curved: Vec<bool>,
}

impl FemSpace {
    pub fn new(mesh: Arc<TaggedMesh>, degree: usize, curved: bool) -> Result<Self> {
        if degree != 1 && degree != 2 {
            return Err(Error::InvalidArgument(format!("element degree {degree} is not 1 or 2")));
        }
        let nv = mesh.num_vertices();
        let edges = mesh.edges();
        let edge_index: HashMap<(usize, usize), usize> =
            edges.iter().enumerate().map(|(i, e)| ((e.v[0], e.v[1]), i)).collect();
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut edge_tag: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for be in &mesh.boundary_edges {
            edge_tag.insert(key(be.v[0], be.v[1]), be.tag);
        }
        let bend = curved && degree == 2 && mesh.domain.is_some();

        let mut nodes = mesh.vertices.clone();
        let mut on_gamma0 = vec![false; nv];
        let mut on_gamma1 = vec![false; nv];
        if degree == 2 {
            for e in &edges {
                let mut p = (mesh.vertices[e.v[0]] + mesh.vertices[e.v[1]]) * 0.5;
                if bend && edge_tag.get(&(e.v[0], e.v[1])) == Some(&BoundaryTag::Gamma0) {
                    p = mesh.domain.as_ref().unwrap().project_to_gamma0(p);
                }
                nodes.push(p);
            }
            on_gamma0.resize(nodes.len(), false);
            on_gamma1.resize(nodes.len(), false);
        }
        for be in &mesh.boundary_edges {
            let flag = match be.tag {
                BoundaryTag::Gamma0 => &mut on_gamma0,
                BoundaryTag::Gamma1 => &mut on_gamma1,
            };
            flag[be.v[0]] = true;
            flag[be.v[1]] = true;
            if degree == 2 {
                flag[nv + edge_index[&key(be.v[0], be.v[1])]] = true;
            }
        }

        let mut elements = Vec::with_capacity(mesh.num_triangles());
        let mut geometry = Vec::with_capacity(mesh.num_triangles());
        let mut is_curved = Vec::with_capacity(mesh.num_triangles());
        for t in &mesh.triangles {
            let mut dofs = [t[0], t[1], t[2], 0, 0, 0];
            let mut geo = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], Point::zeros(), Point::zeros(), Point::zeros()];
            let mut bent = false;
            for (e, [a, b]) in EDGE_VERTS.into_iter().enumerate() {
                let (va, vb) = (t[a], t[b]);
                geo[3 + e] = (mesh.vertices[va] + mesh.vertices[vb]) * 0.5;
                if degree == 2 {
                    let node = nv + edge_index[&key(va, vb)];
                    dofs[3 + e] = node;
                    if (nodes[node] - geo[3 + e]).norm() > 0.0 {
                        geo[3 + e] = nodes[node];
                        bent = true;
                    }
                }
            }
            elements.push(dofs);
            geometry.push(geo);
            is_curved.push(bent);
        }
        let space = Self { mesh, degree, curved: bend, nodes, elements, on_gamma0, on_gamma1, geometry, is_curved };
        space.check_jacobians()?;
        Ok(space)
    }

    fn check_jacobians(&self) -> Result<()> {
        let rule = triangle_rule(2);
        for t in (0..self.num_elements()).filter(|&t| self.is_curved[t]) {
            for q in rule.iter().map(|q| q.bary).chain([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]) {
                if self.jacobian(t, q).determinant() <= 0.0 {
                    return Err(Error::Mesh(format!("curved element {t} is inverted; refine the mesh")));
                }
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn local_dofs(&self) -> usize {
        if self.degree == 1 { 3 } else { 6 }
    }

    pub fn dofs(&self, t: usize) -> &[usize] {
        &self.elements[t][..self.local_dofs()]
    }

    pub fn is_curved(&self, t: usize) -> bool {
        self.is_curved[t]
    }

    pub fn geometry_nodes(&self, t: usize) -> &[Point; 6] {
        &self.geometry[t]
    }

    /// Physical point of a barycentric point.
    pub fn map_point(&self, t: usize, l: [f64; 3]) -> Point {
        let geo = &self.geometry[t];
        if !self.is_curved[t] {
            return geo[0] * l[0] + geo[1] * l[1] + geo[2] * l[2];
        }
        let (v, _) = basis(2, l);
        (0..6).fold(Point::zeros(), |acc, k| acc + geo[k] * v[k])
    }

    /// `J[(a, b)] = ∂x_a / ∂ξ_b`.
    pub fn jacobian(&self, t: usize, l: [f64; 3]) -> Matrix2<f64> {
        let geo = &self.geometry[t];
        let (k, grads) = if self.is_curved[t] { (6, basis(2, l).1) } else { (3, GRAD_LAMBDA.to_vec()) };
        let mut j = Matrix2::zeros();
        for n in 0..k {
            j[(0, 0)] += geo[n].x * grads[n][0];
            j[(0, 1)] += geo[n].x * grads[n][1];
            j[(1, 0)] += geo[n].y * grads[n][0];
            j[(1, 1)] += geo[n].y * grads[n][1];
        }
        j
    }

    /// Second derivatives of the geometry map, one matrix per coordinate.
    pub(crate) fn geometry_hessians(&self, t: usize) -> [Matrix2<f64>; 2] {
        if !self.is_curved[t] {
            return [Matrix2::zeros(); 2];
        }
        let geo = &self.geometry[t];
        let h = basis_hessians();
        let mut out = [Matrix2::zeros(); 2];
        for n in 0..6 {
            out[0] += h[n] * geo[n].x;
            out[1] += h[n] * geo[n].y;
        }
        out
    }

    /// Basis values and physical gradients at a barycentric point, plus
    /// `|det J|/2` (the area factor for barycentric weights).
    pub fn shape(&self, t: usize, l: [f64; 3]) -> (Vec<f64>, Vec<Point>, f64) {
        let (v, g) = basis(self.degree, l);
        let j = self.jacobian(t, l);
        let det = j.determinant();
        let jit = j.try_inverse().expect("degenerate element").transpose();
        let grads = g.iter().map(|gr| jit * Point::new(gr[0], gr[1])).collect();
        (v, grads, 0.5 * det.abs())
    }

    /// Element quadrature (degree-5 rule for P2, degree-2 for P1, unless
    /// `rule` is given).
    pub fn quadrature(&self, t: usize, rule: Option<&[TriPoint]>) -> Vec<QuadPoint> {
        let owned;
        let rule = match rule {
            Some(r) => r,
            None => {
                owned = triangle_rule(if self.is_curved[t] { 2 } else { self.degree });
                &owned
            }
        };
        rule.iter()
            .map(|q| {
                let det = self.jacobian(t, q.bary).determinant().abs();
                QuadPoint { x: self.map_point(t, q.bary), weight: 0.5 * det * q.weight, bary: q.bary }
            })
            .collect()
    }

    /// Gauss points on boundary edge `i` of the mesh.
    pub fn edge_quadrature(&self, i: usize, points: usize) -> Vec<EdgePoint> {
        let be = &self.mesh.boundary_edges[i];
        let (a, b) = (be.local, (be.local + 1) % 3);
        let (pa, pb) = (REF_VERTS[a], REF_VERTS[b]);
        let dir = [pb[0] - pa[0], pb[1] - pa[1]];
        crate::numeric::gauss_legendre_unit(points)
            .iter()
            .map(|&(s, w)| {
                let xi = pa[0] + s * dir[0];
                let eta = pa[1] + s * dir[1];
                let bary = [1.0 - xi - eta, xi, eta];
                let tangent = self.jacobian(be.triangle, bary) * Point::new(dir[0], dir[1]);
                let len = tangent.norm();
                EdgePoint {
                    x: self.map_point(be.triangle, bary),
                    weight: w * len,
                    normal: Point::new(tangent.y, -tangent.x) / len,
                    element: be.triangle,
                    bary,
                }
            })
            .collect()
    }

    /// Edge quadrature over every boundary edge carrying `tag`, in
    /// boundary-edge order.
    pub fn boundary_quadrature(&self, tag: BoundaryTag, points: usize) -> Vec<EdgePoint> {
        (0..self.mesh.boundary_edges.len())
            .filter(|&i| self.mesh.boundary_edges[i].tag == tag)
            .flat_map(|i| self.edge_quadrature(i, points))
            .collect()
    }

    /// Area of the discrete (possibly curved) domain.
    pub fn area(&self) -> f64 {
        let parts: Vec<f64> = (0..self.num_elements())
            .map(|t| self.quadrature(t, None).iter().map(|q| q.weight).sum())
            .collect();
        crate::numeric::pairwise_sum(&parts)
    }

    /// Length of the discrete boundary pieces carrying `tag`.
    pub fn boundary_length(&self, tag: BoundaryTag) -> f64 {
        let w: Vec<f64> = self.boundary_quadrature(tag, 3).iter().map(|p| p.weight).collect();
        crate::numeric::pairwise_sum(&w)
    }

    /// Element containing `p` with its barycentric coordinates.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        const TOL: f64 = 1e-10;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in 0..self.num_elements() {
            let geo = &self.geometry[t];
            let l = affine_bary(geo[0], geo[1], geo[2], p);
            let worst = l.iter().copied().fold(f64::INFINITY, f64::min);
            if !self.is_curved[t] {
                if worst >= -TOL {
                    return Some((t, l));
                }
                continue;
            }
            if worst < -0.5 {
                continue;
            }
            if let Some(l) = self.invert_map(t, p, l) {
                let w = l.iter().copied().fold(f64::INFINITY, f64::min);
                if w >= -TOL && best.is_none_or(|b| w > b.2) {
                    best = Some((t, l, w));
                }
            }
        }
        best.map(|(t, l, _)| (t, l))
    }

    fn invert_map(&self, t: usize, p: Point, start: [f64; 3]) -> Option<[f64; 3]> {
        let mut xi = Point::new(start[1], start[2]);
        for _ in 0..30 {
            let l = [1.0 - xi.x - xi.y, xi.x, xi.y];
            let r = self.map_point(t, l) - p;
            if r.norm() < 1e-14 * (1.0 + p.norm()) {
                return Some(l);
            }
            xi -= self.jacobian(t, l).try_inverse()? * r;
        }
        let l = [1.0 - xi.x - xi.y, xi.x, xi.y];
        ((self.map_point(t, l) - p).norm() < 1e-11).then_some(l)
    }
}

pub(crate) fn affine_bary(a: Point, b: Point, c: Point, p: Point) -> [f64; 3] {
    let det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let l1 = ((p.x - a.x) * (c.y - a.y) - (p.y - a.y) * (c.x - a.x)) / det;
    let l2 = ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / det;
    [1.0 - l1 - l2, l1, l2]
}
