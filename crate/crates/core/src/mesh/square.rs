use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BoundaryEdge, TriMesh};
use crate::error::{Error, Result};

/// Boundary label for each side of a square domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SideLabels {
    pub bottom: u8,
    pub right: u8,
    pub top: u8,
    pub left: u8,
}

impl SideLabels {
    pub fn uniform(label: u8) -> Self {
        Self {
            bottom: label,
            right: label,
            top: label,
            left: label,
        }
    }
}

/// Structured `n x n` triangulation of `(0, side)^2`, each cell split along
/// its (1, 1) diagonal.
///
/// Interior vertices are moved by a seeded random offset drawn uniformly from
/// the disc of radius `perturbation * side / n`; boundary vertices stay put.
/// Offsets below `0.35` cell widths cannot invert a triangle.
pub fn gen_square_mesh(
    side: f64,
    n: usize,
    perturbation: f64,
    seed: u64,
    labels: SideLabels,
) -> Result<TriMesh> {
    if n < 2 {
        return Err(Error::Input(format!("square mesh needs N >= 2, got {n}")));
    }
    if !(0.0..=0.3).contains(&perturbation) {
        return Err(Error::Input(format!("perturbation {perturbation} outside [0, 0.3]")));
    }
    if !(side > 0.0) {
        return Err(Error::Input(format!("side length must be positive, got {side}")));
    }
    let cell = side / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let mut p = [i as f64 * cell, j as f64 * cell];
            // Pin the far edges exactly to the side length.
            if i == n {
                p[0] = side;
            }
            if j == n {
                p[1] = side;
            }
            let interior = i > 0 && i < n && j > 0 && j < n;
            if interior && perturbation > 0.0 {
                let r = perturbation * cell * rng.gen::<f64>().sqrt();
                let theta = std::f64::consts::TAU * rng.gen::<f64>();
                p[0] += r * theta.cos();
                p[1] += r * theta.sin();
            }
            vertices.push(p);
        }
    }

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }

    let mut edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        edges.push(BoundaryEdge { a: id(i, 0), b: id(i + 1, 0), label: labels.bottom });
    }
    for j in 0..n {
        edges.push(BoundaryEdge { a: id(n, j), b: id(n, j + 1), label: labels.right });
    }
    for i in (0..n).rev() {
        edges.push(BoundaryEdge { a: id(i + 1, n), b: id(i, n), label: labels.top });
    }
    for j in (0..n).rev() {
        edges.push(BoundaryEdge { a: id(0, j + 1), b: id(0, j), label: labels.left });
    }

    TriMesh::new(vertices, triangles, edges)
}
