//! Unstructured triangulations with labelled boundary edges.
//!
//! A [`TriMesh`] owns its vertex coordinates, counter-clockwise triangles and
//! the list of boundary edges. Construction validates orientation and checks
//! that the labelled edges cover the topological boundary exactly once, then
//! caches per-element geometry (area, P1 basis gradients) and the
//! triangle-to-triangle adjacency used by the point-location walk.

mod boundary;
mod locate;
mod smf;
mod square;

use std::collections::HashMap;

pub use boundary::{compute_boundary_normals, BoundaryPartition};
pub use locate::{BaryCoord, LOCATE_TOL};
pub use smf::{load_mesh, read_smf, write_smf};
pub use square::{gen_square_mesh, SideLabels};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Label reserved for homogeneous Dirichlet edges; 1..=255 name transmission segments.
pub const DIRICHLET: u8 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub label: u8,
}

/// Area and constant gradients of the three barycentric basis functions.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

#[derive(Clone, Debug)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    geometry: Vec<ElementGeometry>,
    /// `neighbors[t][k]` is the triangle across the edge opposite local vertex `k`.
    neighbors: Vec<[Option<usize>; 3]>,
    /// For each boundary edge, the owning triangle and the local index of the
    /// vertex opposite the edge.
    edge_owner: Vec<(usize, usize)>,
    star_offsets: Vec<usize>,
    star: Vec<usize>,
    diameter: f64,
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl TriMesh {
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::Geometry("mesh has no triangles".into()));
        }
        if let Some((i, v)) = vertices
            .iter()
            .enumerate()
            .find(|(_, v)| !v[0].is_finite() || !v[1].is_finite())
        {
            return Err(Error::Geometry(format!("vertex {i} has non-finite coordinates {v:?}")));
        }

        let mut geometry = Vec::with_capacity(triangles.len());
        let mut diameter = 0.0_f64;
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Geometry(format!("triangle {t} references a missing vertex")));
            }
            let [p0, p1, p2] = tri.map(|v| vertices[v]);
            let twice_area = cross(sub(p1, p0), sub(p2, p0));
            if !(twice_area > 0.0) {
                return Err(Error::Geometry(format!(
                    "triangle {t} has non-positive signed area {:e} (must be counter-clockwise)",
                    0.5 * twice_area
                )));
            }
            let p = [p0, p1, p2];
            let mut grads = [[0.0; 2]; 3];
            for (k, g) in grads.iter_mut().enumerate() {
                let pj = p[(k + 1) % 3];
                let pk = p[(k + 2) % 3];
                *g = [(pj[1] - pk[1]) / twice_area, (pk[0] - pj[0]) / twice_area];
            }
            diameter = diameter.max(dist(p0, p1)).max(dist(p1, p2)).max(dist(p2, p0));
            geometry.push(ElementGeometry {
                area: 0.5 * twice_area,
                grads,
            });
        }

        // Edge -> (triangle, local opposite vertex) incidences.
        let mut incidence: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                incidence.entry((a.min(b), a.max(b))).or_default().push((t, k));
            }
        }
        let mut neighbors = vec![[None; 3]; triangles.len()];
        let mut open_edges = HashMap::new();
        for (key, owners) in &incidence {
            match owners.as_slice() {
                [(t, k)] => {
                    open_edges.insert(*key, (*t, *k));
                }
                [(t0, k0), (t1, k1)] => {
                    neighbors[*t0][*k0] = Some(*t1);
                    neighbors[*t1][*k1] = Some(*t0);
                }
                _ => {
                    return Err(Error::Geometry(format!(
                        "edge {key:?} is shared by {} triangles",
                        owners.len()
                    )))
                }
            }
        }

        let mut edge_owner = Vec::with_capacity(boundary_edges.len());
        let mut seen = HashMap::new();
        for (i, e) in boundary_edges.iter().enumerate() {
            let key = (e.a.min(e.b), e.a.max(e.b));
            let Some(&owner) = open_edges.get(&key) else {
                return Err(Error::Geometry(format!(
                    "boundary edge {i} ({}, {}) is not on the mesh boundary",
                    e.a, e.b
                )));
            };
            if seen.insert(key, i).is_some() {
                return Err(Error::Geometry(format!("boundary edge ({}, {}) listed twice", e.a, e.b)));
            }
            edge_owner.push(owner);
        }
        if seen.len() != open_edges.len() {
            let missing = open_edges.keys().find(|k| !seen.contains_key(*k)).unwrap();
            return Err(Error::Geometry(format!("boundary edge {missing:?} has no label")));
        }

        let mut star_offsets = vec![0usize; nv + 1];
        for tri in &triangles {
            for &v in tri {
                star_offsets[v + 1] += 1;
            }
        }
        for i in 0..nv {
            star_offsets[i + 1] += star_offsets[i];
        }
        let mut fill = star_offsets.clone();
        let mut star = vec![0usize; star_offsets[nv]];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                star[fill[v]] = t;
                fill[v] += 1;
            }
        }

        Ok(Self {
            vertices,
            triangles,
            boundary_edges,
            geometry,
            neighbors,
            edge_owner,
            star_offsets,
            star,
            diameter,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    pub fn neighbors(&self, t: usize) -> [Option<usize>; 3] {
        self.neighbors[t]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Maximum element diameter.
    pub fn h(&self) -> f64 {
        self.diameter
    }

    /// Triangles incident to vertex `v`, in increasing index order.
    pub fn vertex_star(&self, v: usize) -> &[usize] {
        &self.star[self.star_offsets[v]..self.star_offsets[v + 1]]
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Barycentric coordinates of `x` with respect to triangle `t` (unclamped).
    pub fn barycentric(&self, t: usize, x: Point) -> [f64; 3] {
        let tri = self.triangles[t];
        let g = &self.geometry[t].grads;
        let mut lambda = [0.0; 3];
        for k in 0..3 {
            let pj = self.vertices[tri[(k + 1) % 3]];
            lambda[k] = g[k][0] * (x[0] - pj[0]) + g[k][1] * (x[1] - pj[1]);
        }
        lambda
    }

    /// Physical point with barycentric coordinates `lambda` in triangle `t`.
    pub fn map_point(&self, t: usize, lambda: [f64; 3]) -> Point {
        let tri = self.triangles[t];
        let mut x = [0.0; 2];
        for k in 0..3 {
            let p = self.vertices[tri[k]];
            x[0] += lambda[k] * p[0];
            x[1] += lambda[k] * p[1];
        }
        x
    }

    /// Owning triangle and the local index of the vertex opposite boundary edge `i`.
    pub(crate) fn boundary_edge_owner(&self, i: usize) -> (usize, usize) {
        self.edge_owner[i]
    }

    /// Returns a copy whose boundary labels are rewritten by `relabel`.
    pub fn relabeled(&self, relabel: impl Fn(u8) -> u8) -> TriMesh {
        let mut mesh = self.clone();
        for e in &mut mesh.boundary_edges {
            e.label = relabel(e.label);
        }
        mesh
    }

    /// Boundary vertices chained into closed loops (outer boundary and holes).
    ///
    /// Each loop is oriented so that the domain lies to its left.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (i, _) in self.boundary_edges.iter().enumerate() {
            let (t, k) = self.edge_owner[i];
            let tri = self.triangles[t];
            // Counter-clockwise triangle: the edge opposite k runs (k+1) -> (k+2)
            // with the interior on the left.
            next.insert(tri[(k + 1) % 3], tri[(k + 2) % 3]);
        }
        let mut loops = Vec::new();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited = std::collections::HashSet::new();
        for s in starts {
            if visited.contains(&s) {
                continue;
            }
            let mut lp = vec![s];
            visited.insert(s);
            let mut cur = next[&s];
            while cur != s {
                if !visited.insert(cur) {
                    break;
                }
                lp.push(cur);
                match next.get(&cur) {
                    Some(&n) => cur = n,
                    None => break,
                }
            }
            loops.push(lp);
        }
        loops
    }
}
