//! Indexed triangle meshes and topological audits.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use serde::Serialize;
use thiserror::Error;

pub type Vertex = Point3<f64>;

/// Facets with area at or below this are reported as degenerate (mm²).
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("facet {facet} references vertex {index} but mesh has {count} vertices")]
    IndexOutOfRange { facet: usize, index: usize, count: usize },
    #[error("facet {0} is degenerate")]
    DegenerateFacet(usize),
    #[error("facet {0} normal is not unit length")]
    BadNormal(usize),
    #[error("facet {0} normal disagrees with its winding")]
    NormalWindingMismatch(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub indices: [usize; 3],
    pub normal: Vector3<f64>,
}

/// Unit normal by the right-hand rule, or zero for a degenerate triangle.
pub fn triangle_normal(a: &Vertex, b: &Vertex, c: &Vertex) -> Vector3<f64> {
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    if len > 0.0 && len.is_finite() {
        n / len
    } else {
        Vector3::zeros()
    }
}

pub fn triangle_area(a: &Vertex, b: &Vertex, c: &Vertex) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vertex>,
    facets: Vec<Facet>,
}

impl TriangleMesh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn add_vertex(&mut self, v: Vertex) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    /// Adds a facet, deriving its normal from the winding.
    pub fn add_triangle(&mut self, indices: [usize; 3]) {
        let [a, b, c] = indices.map(|i| self.vertices[i]);
        let normal = triangle_normal(&a, &b, &c);
        self.facets.push(Facet { indices, normal });
    }

    /// Adds a facet with an externally supplied normal.
    pub fn add_facet(&mut self, facet: Facet) {
        self.facets.push(facet);
    }

    pub fn triangle(&self, facet: usize) -> [Vertex; 3] {
        self.facets[facet].indices.map(|i| self.vertices[i])
    }

    /// Appends `other`, offsetting its indices.
    pub fn append(&mut self, other: &TriangleMesh) {
        let offset = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.facets.extend(other.facets.iter().map(|f| Facet {
            indices: f.indices.map(|i| i + offset),
            normal: f.normal,
        }));
    }

    pub fn translated(&self, offset: Vector3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            facets: self.facets.clone(),
        }
    }

    /// Reverses every facet's winding and normal.
    pub fn flipped(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    indices: [f.indices[0], f.indices[2], f.indices[1]],
                    normal: -f.normal,
                })
                .collect(),
        }
    }

    /// Merges vertices closer than `tol` (Chebyshev distance) onto the
    /// lowest-indexed representative and drops unreferenced vertices.
    /// Vertex order follows first use, so the result is deterministic.
    pub fn welded(&self, tol: f64) -> Self {
        let cell = if tol > 0.0 { tol } else { f64::MIN_POSITIVE };
        let key = |v: &Vertex| {
            [
                (v.x / cell).floor() as i64,
                (v.y / cell).floor() as i64,
                (v.z / cell).floor() as i64,
            ]
        };
        let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        let mut rep = vec![0usize; self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            let k = key(v);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(bucket) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                            for &j in bucket {
                                let d = v - self.vertices[j];
                                if d.x.abs() <= tol && d.y.abs() <= tol && d.z.abs() <= tol {
                                    found = Some(j);
                                    break 'search;
                                }
                            }
                        }
                    }
                }
            }
            match found {
                Some(j) => rep[i] = j,
                None => {
                    rep[i] = i;
                    grid.entry(k).or_default().push(i);
                }
            }
        }

        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut out = TriangleMesh::new();
        for f in &self.facets {
            let indices = f.indices.map(|i| {
                let r = rep[i];
                *remap.entry(r).or_insert_with(|| out.add_vertex(self.vertices[r]))
            });
            out.facets.push(Facet { indices, normal: f.normal });
        }
        out
    }

    /// Enclosed volume by the divergence theorem; positive when facets
    /// wind counter-clockwise seen from outside.
    pub fn signed_volume(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| {
                let [a, b, c] = f.indices.map(|i| self.vertices[i].coords);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.facets.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                triangle_area(&a, &b, &c)
            })
            .sum()
    }

    /// Checks index ranges, facet areas and normal/winding agreement.
    pub fn validate(&self) -> Result<(), MeshError> {
        for (fi, f) in self.facets.iter().enumerate() {
            for &index in &f.indices {
                if index >= self.vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        facet: fi,
                        index,
                        count: self.vertices.len(),
                    });
                }
            }
            let [a, b, c] = self.triangle(fi);
            if triangle_area(&a, &b, &c) <= DEGENERATE_AREA {
                return Err(MeshError::DegenerateFacet(fi));
            }
            if (f.normal.norm() - 1.0).abs() > 1e-9 {
                return Err(MeshError::BadNormal(fi));
            }
            if triangle_normal(&a, &b, &c).dot(&f.normal) <= 0.0 {
                return Err(MeshError::NormalWindingMismatch(fi));
            }
        }
        Ok(())
    }

    pub fn audit(&self) -> MeshAudit {
        MeshAudit::of(self)
    }
}

/// Topology summary of a mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshAudit {
    pub vertices: usize,
    pub edges: usize,
    pub facets: usize,
    /// Edges used by exactly one facet.
    pub boundary_edges: usize,
    /// Edges used by three or more facets.
    pub nonmanifold_edges: usize,
    /// Two-facet edges traversed in the same direction by both facets.
    pub misoriented_edges: usize,
    pub degenerate_facets: usize,
    /// Facet-connected components.
    pub components: usize,
    pub euler_characteristic: i64,
    pub signed_volume: f64,
}

impl MeshAudit {
    pub fn of(mesh: &TriangleMesh) -> Self {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        let mut used = vec![false; mesh.vertices.len()];
        let mut degenerate = 0;
        for (fi, f) in mesh.facets.iter().enumerate() {
            let [a, b, c] = mesh.triangle(fi);
            if triangle_area(&a, &b, &c) <= DEGENERATE_AREA {
                degenerate += 1;
            }
            for k in 0..3 {
                used[f.indices[k]] = true;
                *directed
                    .entry((f.indices[k], f.indices[(k + 1) % 3]))
                    .or_default() += 1;
            }
        }

        let mut undirected: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (&(a, b), &count) in &directed {
            let e = undirected.entry((a.min(b), a.max(b))).or_default();
            if a < b {
                e.0 += count;
            } else {
                e.1 += count;
            }
        }
        let mut boundary = 0;
        let mut nonmanifold = 0;
        let mut misoriented = 0;
        for &(fwd, back) in undirected.values() {
            match fwd + back {
                1 => boundary += 1,
                2 => {
                    if fwd != 1 {
                        misoriented += 1;
                    }
                }
                _ => nonmanifold += 1,
            }
        }

        // Union-find over vertices; facets sharing a vertex are connected.
        let mut parent: Vec<usize> = (0..mesh.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for f in &mesh.facets {
            let r0 = find(&mut parent, f.indices[0]);
            for &i in &f.indices[1..] {
                let r = find(&mut parent, i);
                if r != r0 {
                    parent[r] = r0;
                }
            }
        }
        let mut roots: Vec<usize> = (0..mesh.vertices.len())
            .filter(|&v| used[v])
            .map(|v| find(&mut parent, v))
            .collect();
        roots.sort_unstable();
        roots.dedup();

        let v = used.iter().filter(|&&u| u).count();
        let e = undirected.len();
        let f = mesh.facets.len();
        MeshAudit {
            vertices: v,
            edges: e,
            facets: f,
            boundary_edges: boundary,
            nonmanifold_edges: nonmanifold,
            misoriented_edges: misoriented,
            degenerate_facets: degenerate,
            components: roots.len(),
            euler_characteristic: v as i64 - e as i64 + f as i64,
            signed_volume: mesh.signed_volume(),
        }
    }

    /// Every edge is shared by exactly two facets.
    pub fn is_edge_manifold(&self) -> bool {
        self.facets > 0 && self.boundary_edges == 0 && self.nonmanifold_edges == 0
    }

    /// Closed, consistently oriented and free of degenerate facets.
    pub fn is_watertight(&self) -> bool {
        self.is_edge_manifold() && self.misoriented_edges == 0 && self.degenerate_facets == 0
    }

    /// Genus of a closed orientable surface, if the mesh is one.
    pub fn genus(&self) -> Option<i64> {
        if !self.is_watertight() {
            return None;
        }
        let twice = 2 * self.components as i64 - self.euler_characteristic;
        (twice >= 0 && twice % 2 == 0).then_some(twice / 2)
    }
}
