use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::geometry::DomainSpec;
use crate::{Error, Point, Result};

/// Which analytic boundary piece an edge approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Dirichlet part, the radial graph.
    Gamma0,
    /// Neumann part, on the cone boundary.
    Gamma1,
}

impl BoundaryTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryTag::Gamma0 => "GAMMA0",
            BoundaryTag::Gamma1 => "GAMMA1",
        }
    }
}

/// Boundary edge oriented with the domain on its left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub tag: BoundaryTag,
    /// Triangle owning this edge.
    pub triangle: usize,
    /// Local edge index inside the owning triangle (edge `i` joins local
    /// vertices `i` and `(i + 1) % 3`).
    pub local: usize,
}

/// Conforming triangulation with tagged boundary edges.
#[derive(Debug, Clone)]
pub struct TaggedMesh {
    pub vertices: Vec<Point>,
    /// Positively oriented index triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub h_max: f64,
    /// Smallest interior angle in degrees.
    pub min_angle: f64,
    /// Analytic domain used for boundary projection, when known.
    pub domain: Option<Arc<DomainSpec>>,
    /// Number of uniform refinements applied since generation.
    pub level: usize,
}

/// Unique edge of a mesh with its adjacent triangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshEdge {
    pub v: [usize; 2],
    pub triangles: [Option<usize>; 2],
}

impl TaggedMesh {
    /// Builds a mesh from raw parts; every edge owned by a single triangle
    /// becomes a boundary edge tagged by `tag_of(a, b)`.
    pub fn from_parts<F>(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        domain: Option<Arc<DomainSpec>>,
        tag_of: F,
    ) -> Result<Self>
    where
        F: Fn(Point, Point) -> BoundaryTag,
    {
        let mut triangles = triangles;
        for t in &mut triangles {
            let a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if a == 0.0 {
                return Err(Error::InvalidMesh(format!("degenerate triangle {t:?}")));
            }
            if a < 0.0 {
                t.swap(1, 2);
            }
        }
        let mut mesh = Self {
            vertices,
            triangles,
            boundary_edges: Vec::new(),
            h_max: 0.0,
            min_angle: 0.0,
            domain,
            level: 0,
        };
        mesh.boundary_edges = mesh
            .edges()
            .into_iter()
            .filter(|e| e.triangles[1].is_none())
            .map(|e| {
                let t = e.triangles[0].unwrap();
                let tri = mesh.triangles[t];
                let local = (0..3)
                    .find(|&i| {
                        let (a, b) = (tri[i], tri[(i + 1) % 3]);
                        (a == e.v[0] && b == e.v[1]) || (a == e.v[1] && b == e.v[0])
                    })
                    .unwrap();
                let v = [tri[local], tri[(local + 1) % 3]];
                let tag = tag_of(mesh.vertices[v[0]], mesh.vertices[v[1]]);
                BoundaryEdge { v, tag, triangle: t, local }
            })
            .collect();
        mesh.update_metrics();
        Ok(mesh)
    }

    pub fn update_metrics(&mut self) {
        let mut h_max: f64 = 0.0;
        let mut min_angle = f64::INFINITY;
        for t in &self.triangles {
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            for i in 0..3 {
                h_max = h_max.max((p[(i + 1) % 3] - p[i]).norm());
                min_angle = min_angle.min(corner_angle(p[i], p[(i + 1) % 3], p[(i + 2) % 3]));
            }
        }
        self.h_max = h_max;
        self.min_angle = min_angle.to_degrees();
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Unique edges in order of first appearance while scanning triangles.
    pub fn edges(&self) -> Vec<MeshEdge> {
        let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * self.triangles.len() / 2 + 8);
        let mut edges: Vec<MeshEdge> = Vec::with_capacity(3 * self.triangles.len() / 2 + 8);
        for (ti, t) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                match index.get(&key) {
                    Some(&e) => edges[e].triangles[1] = Some(ti),
                    None => {
                        index.insert(key, edges.len());
                        edges.push(MeshEdge { v: [key.0, key.1], triangles: [Some(ti), None] });
                    }
                }
            }
        }
        edges
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        signed_area(p[0], p[1], p[2])
    }

    /// Sum of (straight) triangle areas.
    pub fn area(&self) -> f64 {
        let areas: Vec<f64> = (0..self.triangles.len()).map(|t| self.triangle_area(t)).collect();
        crate::numeric::pairwise_sum(&areas)
    }

    /// Total length of the boundary edges carrying `tag`.
    pub fn boundary_length(&self, tag: BoundaryTag) -> f64 {
        let lengths: Vec<f64> = self
            .boundary_edges
            .iter()
            .filter(|e| e.tag == tag)
            .map(|e| (self.vertices[e.v[1]] - self.vertices[e.v[0]]).norm())
            .collect();
        crate::numeric::pairwise_sum(&lengths)
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_edges.iter().any(|e| e.tag == tag)
    }

    /// Structural validation: orientation, edge multiplicity, Euler relation.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {i} references a missing vertex")));
            }
            if self.triangle_area(i) <= 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {i} is not positively oriented")));
            }
        }
        let edges = self.edges();
        let boundary: usize = edges.iter().filter(|e| e.triangles[1].is_none()).count();
        if boundary != self.boundary_edges.len() {
            return Err(Error::InvalidMesh(format!(
                "{} single-owner edges but {} tagged boundary edges",
                boundary,
                self.boundary_edges.len()
            )));
        }
        let mut seen: HashMap<(usize, usize), u8> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let c = seen.entry((a, b)).or_default();
                *c += 1;
                if *c > 1 {
                    return Err(Error::InvalidMesh(format!("directed edge ({a}, {b}) used twice")));
                }
            }
        }
        let euler = self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64;
        if euler != 1 {
            return Err(Error::InvalidMesh(format!("Euler characteristic {euler} (expected 1)")));
        }
        Ok(())
    }

    /// Plain-text dump with `VERTICES`, `TRIANGLES` and `BOUNDARY_EDGES`
    /// sections, one record per line.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "VERTICES {}", self.vertices.len()).unwrap();
        for (i, p) in self.vertices.iter().enumerate() {
            writeln!(out, "{i} {:.17e} {:.17e}", p.x, p.y).unwrap();
        }
        writeln!(out, "TRIANGLES {}", self.triangles.len()).unwrap();
        for (i, t) in self.triangles.iter().enumerate() {
            writeln!(out, "{i} {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        writeln!(out, "BOUNDARY_EDGES {}", self.boundary_edges.len()).unwrap();
        for (i, e) in self.boundary_edges.iter().enumerate() {
            writeln!(out, "{i} {} {} {}", e.v[0], e.v[1], e.tag.as_str()).unwrap();
        }
        out
    }

    /// Parses the output of [`TaggedMesh::export_text`]. The analytic domain
    /// is not part of the format, so the result carries none.
    pub fn import_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidMesh(format!("mesh text: {msg}"));
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut tags: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        let mut state = "";
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[0] {
                "VERTICES" | "TRIANGLES" | "BOUNDARY_EDGES" => {
                    state = f[0];
                    continue;
                }
                _ => {}
            }
            let num = |i: usize| -> Result<f64> { f.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad(line)) };
            let idx = |i: usize| -> Result<usize> { f.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad(line)) };
            match state {
                "VERTICES" => vertices.push(Point::new(num(1)?, num(2)?)),
                "TRIANGLES" => triangles.push([idx(1)?, idx(2)?, idx(3)?]),
                "BOUNDARY_EDGES" => {
                    let tag = match f.get(3) {
                        Some(&"GAMMA0") => BoundaryTag::Gamma0,
                        Some(&"GAMMA1") => BoundaryTag::Gamma1,
                        _ => return Err(bad(line)),
                    };
                    let (a, b) = (idx(1)?, idx(2)?);
                    tags.insert((a.min(b), a.max(b)), tag);
                }
                _ => return Err(bad("record before first section")),
            }
        }
        let index: HashMap<(u64, u64), usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, p): (usize, &Point)| ((p.x.to_bits(), p.y.to_bits()), i))
            .collect();
        let lookup = |p: Point| index[&(p.x.to_bits(), p.y.to_bits())];
        let mut mesh = TaggedMesh::from_parts(vertices, triangles, None, |a, b| {
            let (i, j) = (lookup(a), lookup(b));
            tags.get(&(i.min(j), i.max(j))).copied().unwrap_or(BoundaryTag::Gamma0)
        })?;
        mesh.update_metrics();
        Ok(mesh)
    }
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
}

/// Interior angle at `a` of the triangle `(a, b, c)`, radians.
pub(crate) fn corner_angle(a: Point, b: Point, c: Point) -> f64 {
    let u = b - a;
    let v = c - a;
    u.perp(&v).abs().atan2(u.dot(&v))
}
