use std::collections::HashMap;
use std::sync::Arc;

use super::mesh::{signed_area, BoundaryTag, TaggedMesh};
use crate::geometry::DomainSpec;
use crate::{Error, Point, Result};

/// Ring layout of a radial-graph domain: concentric scaled copies of `Γ0`
/// with vertices equidistributed in arc length, zipped together and made
/// Delaunay by edge flips.
pub fn triangulate(spec: &DomainSpec, h_target: f64) -> Result<TaggedMesh> {
    let partition = crate::geometry::boundary_partition(spec);
    let diam = crate::geometry::diameter(&partition);
    if !(h_target > 0.0) || h_target >= diam {
        return Err(Error::Mesh(format!("h_target {h_target} must lie in (0, diameter = {diam:.4})")));
    }
    let closed = spec.cone.is_full_plane();
    let table = spec.arc_length_table(16 * spec.samples);
    let length = table.total();
    let rings = ((spec.max_radius() / (h_target * 0.5 * 3f64.sqrt())).ceil() as usize).max(2);

    let mut vertices = vec![Point::zeros()];
    // per ring: vertex ids and normalized arc positions
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    let mut ring_sigma: Vec<Vec<f64>> = vec![vec![0.0]];
    for j in 1..=rings {
        let s = j as f64 / rings as f64;
        let raw = (s * length / h_target).round() as usize;
        let (ids, sigmas): (Vec<usize>, Vec<f64>) = if closed {
            let m = raw.max(6);
            let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
            (0..m)
                .map(|k| {
                    let sigma = (k as f64 + shift) / m as f64;
                    vertices.push(spec.gamma0_point(table.angle_at(sigma)) * s);
                    (vertices.len() - 1, sigma)
                })
                .unzip()
        } else {
            let m = raw.max(1);
            (0..=m)
                .map(|k| {
                    let sigma = k as f64 / m as f64;
                    let t = table.angle_at(sigma);
                    let p = if k == 0 {
                        spec.ray(0.0) * (s * spec.radius.value(0.0))
                    } else if k == m {
                        spec.ray(spec.opening()) * (s * spec.radius.value(spec.opening()))
                    } else {
                        spec.gamma0_point(t) * s
                    };
                    vertices.push(p);
                    (vertices.len() - 1, sigma)
                })
                .unzip()
        };
        ring_ids.push(ids);
        ring_sigma.push(sigmas);
    }

    let mut triangles = Vec::new();
    // fan around the apex
    {
        let ids = &ring_ids[1];
        let n = ids.len();
        let segs = if closed { n } else { n - 1 };
        for k in 0..segs {
            triangles.push([0, ids[k], ids[(k + 1) % n]]);
        }
    }
    for j in 1..rings {
        zip_rings(
            &ring_ids[j],
            &ring_sigma[j],
            &ring_ids[j + 1],
            &ring_sigma[j + 1],
            closed,
            &mut triangles,
        );
    }
    for t in &mut triangles {
        if signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
    delaunay_flips(&vertices, &mut triangles);

    let outer: std::collections::HashSet<usize> = ring_ids[rings].iter().copied().collect();
    let index: HashMap<(u64, u64), usize> =
        vertices.iter().enumerate().map(|(i, p)| ((p.x.to_bits(), p.y.to_bits()), i)).collect();
    let domain = Arc::new(spec.clone());
    let mesh = TaggedMesh::from_parts(vertices, triangles, Some(domain), |a, b| {
        let ia = index[&(a.x.to_bits(), a.y.to_bits())];
        let ib = index[&(b.x.to_bits(), b.y.to_bits())];
        if outer.contains(&ia) && outer.contains(&ib) {
            BoundaryTag::Gamma0
        } else {
            BoundaryTag::Gamma1
        }
    })?;
    mesh.validate().map_err(|e| Error::Mesh(e.to_string()))?;
    Ok(mesh)
}

fn zip_rings(
    inner: &[usize],
    inner_sigma: &[f64],
    outer: &[usize],
    outer_sigma: &[f64],
    closed: bool,
    triangles: &mut Vec<[usize; 3]>,
) {
    let (ni, no) = (inner.len(), outer.len());
    if !closed {
        let (mut i, mut k) = (0, 0);
        while i + 1 < ni || k + 1 < no {
            let advance_inner = if i + 1 == ni {
                false
            } else if k + 1 == no {
                true
            } else {
                inner_sigma[i + 1] + inner_sigma[i] <= outer_sigma[k + 1] + outer_sigma[k]
            };
            if advance_inner {
                triangles.push([inner[i], outer[k], inner[i + 1]]);
                i += 1;
            } else {
                triangles.push([inner[i], outer[k], outer[k + 1]]);
                k += 1;
            }
        }
        return;
    }
    // unwrap both rings starting at the outer vertex just below inner[0]
    let start = inner_sigma[0];
    let k0 = (0..no)
        .filter(|&k| outer_sigma[k] <= start)
        .max_by(|&a, &b| outer_sigma[a].total_cmp(&outer_sigma[b]))
        .unwrap_or(no - 1);
    let in_pos = |i: usize| inner_sigma[i % ni] + (i / ni) as f64;
    let out_pos = |k: usize| {
        let idx = k0 + k;
        let base = outer_sigma[idx % no] + (idx / no) as f64;
        if outer_sigma[k0] > start { base - 1.0 } else { base }
    };
    let (mut i, mut k) = (0, 0);
    while i < ni || k < no {
        let advance_inner = if i == ni {
            false
        } else if k == no {
            true
        } else {
            in_pos(i + 1) + in_pos(i) <= out_pos(k + 1) + out_pos(k)
        };
        let a = inner[i % ni];
        let b = outer[(k0 + k) % no];
        if advance_inner {
            triangles.push([a, b, inner[(i + 1) % ni]]);
            i += 1;
        } else {
            triangles.push([a, b, outer[(k0 + k + 1) % no]]);
            k += 1;
        }
    }
}

/// Lawson flips until every interior edge is locally Delaunay.
pub(crate) fn delaunay_flips(vertices: &[Point], triangles: &mut [[usize; 3]]) {
    for _sweep in 0..200 {
        let mut owners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                owners.entry((a.min(b), a.max(b))).or_default().push((ti, i));
            }
        }
        let mut keys: Vec<(usize, usize)> = owners.keys().copied().collect();
        keys.sort_unstable();
        let mut touched = vec![false; triangles.len()];
        let mut flips = 0;
        for key in keys {
            let o = &owners[&key];
            if o.len() != 2 {
                continue;
            }
            let (t1, e1) = o[0];
            let (t2, e2) = o[1];
            if touched[t1] || touched[t2] {
                continue;
            }
            let tri1 = triangles[t1];
            let tri2 = triangles[t2];
            let (a, b) = (tri1[e1], tri1[(e1 + 1) % 3]);
            let c = tri1[(e1 + 2) % 3];
            let d = tri2[(e2 + 2) % 3];
            let (pa, pb, pc, pd) = (vertices[a], vertices[b], vertices[c], vertices[d]);
            // opposite angles at c and d
            let alpha = super::mesh::corner_angle(pc, pa, pb);
            let beta = super::mesh::corner_angle(pd, pa, pb);
            if alpha + beta <= std::f64::consts::PI + 1e-12 {
                continue;
            }
            // new triangles (c, a, d) and (d, b, c) must stay positive
            if signed_area(pc, pa, pd) <= 0.0 || signed_area(pd, pb, pc) <= 0.0 {
                continue;
            }
            triangles[t1] = [c, a, d];
            triangles[t2] = [d, b, c];
            touched[t1] = true;
            touched[t2] = true;
            flips += 1;
        }
        if flips == 0 {
            return;
        }
    }
}

/// Structured triangulation of `[0, width] × [0, height]` with alternating
/// diagonals; every boundary edge is tagged `Gamma0`.
pub fn rectangle(width: f64, height: f64, nx: usize, ny: usize) -> Result<TaggedMesh> {
    if nx == 0 || ny == 0 || !(width > 0.0) || !(height > 0.0) {
        return Err(Error::Mesh("rectangle needs positive sizes and cell counts".into()));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point::new(width * i as f64 / nx as f64, height * j as f64 / ny as f64));
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    TaggedMesh::from_parts(vertices, triangles, None, |_, _| BoundaryTag::Gamma0)
}
