use std::collections::HashMap;

use super::mesh::{BoundaryEdge, BoundaryTag, TaggedMesh};
use crate::Point;

/// Regular 1→4 subdivision. Midpoints of `Γ0` edges are projected radially
/// onto the analytic boundary when the mesh carries its domain.
pub fn refine(mesh: &TaggedMesh) -> TaggedMesh {
    let mut vertices = mesh.vertices.clone();
    let gamma0: HashMap<(usize, usize), BoundaryTag> = mesh
        .boundary_edges
        .iter()
        .map(|e| ((e.v[0].min(e.v[1]), e.v[0].max(e.v[1])), e.tag))
        .collect();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * mesh.triangles.len() / 2);
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let mut p = (vertices[a] + vertices[b]) * 0.5;
            if gamma0.get(&key) == Some(&BoundaryTag::Gamma0) {
                if let Some(domain) = &mesh.domain {
                    p = domain.project_to_gamma0(p);
                }
            }
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    let mut children: Vec<[usize; 4]> = Vec::with_capacity(mesh.triangles.len());
    for t in &mesh.triangles {
        let [a, b, c] = *t;
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        let base = triangles.len();
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
        children.push([base, base + 1, base + 2, base + 3]);
    }
    // edge i of the parent (local vertices i, i+1) is split between the
    // corner children i and i+1, whose local edges are 0 and 2 / 0 and 1.
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let m = midpoint[&(e.v[0].min(e.v[1]), e.v[0].max(e.v[1]))];
        let ch = children[e.triangle];
        let (first, second) = match e.local {
            0 => ((ch[0], 0), (ch[1], 0)),
            1 => ((ch[1], 1), (ch[2], 1)),
            _ => ((ch[2], 2), (ch[0], 2)),
        };
        boundary_edges.push(BoundaryEdge { v: [e.v[0], m], tag: e.tag, triangle: first.0, local: first.1 });
        boundary_edges.push(BoundaryEdge { v: [m, e.v[1]], tag: e.tag, triangle: second.0, local: second.1 });
    }
    let mut out = TaggedMesh {
        vertices,
        triangles,
        boundary_edges,
        h_max: 0.0,
        min_angle: 0.0,
        domain: mesh.domain.clone(),
        level: mesh.level + 1,
    };
    out.update_metrics();
    out
}
